use std::collections::BTreeSet;

use num_complex::Complex64;

use super::SpectralError;
use crate::diffpoly::{DiffPoly, Factors, Jet, Symbol};
use crate::rational::GaussianRational;

/// One jet power inside a monomial. Conjugate factors read ψ̄ jets as the
/// complex conjugate of the matching ψ jet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanFactor {
    pub conjugate: bool,
    pub order: u32,
    pub exponent: u32,
    /// Position of the ψ-jet of this order in [`EvalPlan::jet_orders`].
    pub slot: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanTerm {
    pub coeff: GaussianRational,
    pub value: Complex64,
    pub factors: Vec<PlanFactor>,
}

/// A reduced differential polynomial compiled to an instruction list.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalPlan {
    source: DiffPoly,
    orders: Vec<u32>,
    terms: Vec<PlanTerm>,
}

pub fn compile_plan(h: &DiffPoly) -> Result<EvalPlan, SpectralError> {
    let mut orders = BTreeSet::new();
    for jet in h.jets() {
        match jet.symbol {
            Symbol::Psi | Symbol::PsiBar => {
                orders.insert(jet.order);
            }
            _ => return Err(SpectralError::UnreducedInput(jet)),
        }
    }
    let orders: Vec<u32> = orders.into_iter().collect();
    let slot = |o: u32| orders.binary_search(&o).expect("collected above");
    let terms = h
        .terms()
        .iter()
        .map(|m| PlanTerm {
            coeff: m.coeff.clone(),
            value: m.coeff.to_complex64(),
            factors: m
                .factors
                .as_slice()
                .iter()
                .map(|&(jet, exponent)| PlanFactor {
                    conjugate: jet.symbol == Symbol::PsiBar,
                    order: jet.order,
                    exponent,
                    slot: slot(jet.order),
                })
                .collect(),
        })
        .collect();
    Ok(EvalPlan {
        source: h.clone(),
        orders,
        terms,
    })
}

impl EvalPlan {
    pub fn source(&self) -> &DiffPoly {
        &self.source
    }

    /// Sorted distinct ψ-derivative orders the plan reads.
    pub fn jet_orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn max_jet_order(&self) -> Option<u32> {
        self.orders.last().copied()
    }

    pub fn terms(&self) -> &[PlanTerm] {
        &self.terms
    }

    /// Rebuilds the polynomial from the instruction list alone.
    pub fn decompile(&self) -> DiffPoly {
        DiffPoly::from_terms(self.terms.iter().map(|t| {
            let pairs = t.factors.iter().map(|f| {
                let sym = if f.conjugate { Symbol::PsiBar } else { Symbol::Psi };
                (Jet::new(sym, f.order), f.exponent)
            });
            (t.coeff.clone(), Factors::from_pairs(pairs))
        }))
    }

    /// Accumulates terms pointwise in a fixed order. `jets[s]` holds the ψ-jet
    /// of order `jet_orders()[s]`.
    pub fn evaluate_with_jets(&self, jets: &[Vec<Complex64>], n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in &self.terms {
                let mut v = t.value;
                for f in &t.factors {
                    let z = jets[f.slot][i];
                    let z = if f.conjugate { z.conj() } else { z };
                    v *= if f.exponent == 1 { z } else { z.powu(f.exponent) };
                }
                acc += v;
            }
            *o = acc;
        }
        out
    }

    /// Point evaluation from ψ-jet values indexed by derivative order.
    pub fn evaluate_point(&self, psi_jets: &[Complex64]) -> Complex64 {
        let jets: Vec<Vec<Complex64>> = self.orders.iter().map(|&o| vec![psi_jets[o as usize]]).collect();
        self.evaluate_with_jets(&jets, 1)[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::int;
    use crate::hierarchy::standard_table;

    #[test]
    fn h1_orders() {
        let t = standard_table();
        let p = compile_plan(t.scalar_h(1).unwrap()).unwrap();
        assert_eq!(p.jet_orders(), &[0, 2]);
        assert_eq!(p.decompile(), *t.scalar_h(1).unwrap());
    }

    #[test]
    fn h5_skips_fifth_derivative() {
        let t = standard_table();
        let p = compile_plan(t.scalar_h(5).unwrap()).unwrap();
        assert_eq!(p.jet_orders(), &[0, 1, 2, 3, 4, 6]);
    }

    #[test]
    fn constants_need_no_jets() {
        let p = compile_plan(&int(3)).unwrap();
        assert!(p.jet_orders().is_empty());
        assert_eq!(p.evaluate_point(&[]), Complex64::new(3.0, 0.0));
    }

    #[test]
    fn rejects_unreduced() {
        assert!(matches!(
            compile_plan(&DiffPoly::phi(1)),
            Err(SpectralError::UnreducedInput(_))
        ));
    }

    #[test]
    fn decompiles_all_generated_flows() {
        let t = standard_table();
        for k in 1..=t.max_order() {
            let h = t.scalar_h(k).unwrap();
            assert_eq!(&compile_plan(h).unwrap().decompile(), h);
        }
    }
}
