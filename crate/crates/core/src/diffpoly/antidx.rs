//! Integration by parts on the highest jet order.
//!
//! At each level `n` (the current maximal jet order) the symbols are swept in
//! canonical order. A term `c·(s,n)·(s,n−1)^e·R` with `R` free of order-n jets
//! integrates to `c/(e+1)·(s,n−1)^(e+1)·R`; subtracting the derivative of that
//! candidate removes the term and only introduces order-n jets of symbols that
//! have not been swept yet. A term that is nonlinear in order-n jets, or that
//! carries `(t,n−1)` for an already swept symbol `t`, cannot belong to an exact
//! polynomial, and neither can anything left at order zero.

use super::{DiffPoly, DiffPolyError, Factors, Jet, Symbol};
use crate::rational::GaussianRational;

pub(super) fn antidx(p: &DiffPoly) -> Result<DiffPoly, DiffPolyError> {
    let mut rem = p.clone();
    let mut result = DiffPoly::zero();
    loop {
        if rem.is_zero() {
            return Ok(result);
        }
        let n = rem.max_order().unwrap_or(0);
        if n == 0 {
            return Err(DiffPolyError::NotExact { remainder: rem });
        }
        for (idx, &s) in Symbol::ALL.iter().enumerate() {
            let swept = &Symbol::ALL[..idx];
            let top = Jet::new(s, n);
            let below = Jet::new(s, n - 1);
            while let Some(m) = rem.terms().iter().find(|m| m.factors.exponent(top) > 0).cloned() {
                let rest = m.factors.remove_one(top).expect("top jet present");
                let nonlinear = rest.as_slice().iter().any(|(j, _)| j.order >= n);
                let blocked = rest
                    .as_slice()
                    .iter()
                    .any(|(j, _)| j.order == n - 1 && swept.contains(&j.symbol));
                if nonlinear || blocked {
                    return Err(DiffPolyError::NotExact { remainder: rem });
                }
                let e = rest.exponent(below);
                let candidate = DiffPoly::from_terms([(
                    &m.coeff / &GaussianRational::integer(e as i64 + 1),
                    Factors::from_pairs(rest.as_slice().iter().copied().chain([(below, 1)])),
                )]);
                rem = &rem - &candidate.dx();
                result = &result + &candidate;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{imag, int};
    use super::*;

    #[test]
    fn integrates_diagonal_density() {
        let p = imag(1) * DiffPoly::psi(1) * DiffPoly::phi(0) + imag(1) * DiffPoly::psi(0) * DiffPoly::phi(1);
        let q = p.antidx().unwrap();
        assert_eq!(q, imag(1) * DiffPoly::psi(0) * DiffPoly::phi(0));
        assert_eq!(q.dx(), p);
    }

    #[test]
    fn zero_integrates_to_zero() {
        assert_eq!(DiffPoly::zero().antidx().unwrap(), DiffPoly::zero());
    }

    #[test]
    fn square_is_not_exact() {
        let p = DiffPoly::psi(0).pow(2);
        assert!(matches!(p.antidx(), Err(DiffPolyError::NotExact { .. })));
        // cross-check with the Euler operator
        assert!(!p.euler(Symbol::Psi).is_zero());
    }

    #[test]
    fn power_of_lower_jet() {
        // (psi_x^3)_x = 3 psi_x^2 psi_xx
        let p = int(3) * DiffPoly::psi(1).pow(2) * DiffPoly::psi(2);
        assert_eq!(p.antidx().unwrap(), DiffPoly::psi(1).pow(3));
    }

    #[test]
    fn half_of_a_product_rule_is_not_exact() {
        let p = DiffPoly::psi(1) * DiffPoly::phi(0);
        let err = p.antidx().unwrap_err();
        match err {
            DiffPolyError::NotExact { remainder } => assert!(!remainder.is_zero()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constants_are_not_exact() {
        assert!(int(5).antidx().is_err());
    }
}
