//! Reduction of a flow on the real profile `A(ξ) = a·sech(aξ)`.
//!
//! With `ψ = A(x − vt)e^{iωt}` every ψ-jet is `A^{(n)}e^{iωt}`, and the flow
//! polynomial collapses to `e^{iωt}·P(A, A', A'', …)`. Using
//! `A'' = sA − 2A³` and `A'² = sA² − A⁴` with `s = a²`, `P` has the normal
//! form `f(A) + A'·g(A)`, where `f` and `g` are polynomials over `ℚ[s]`. The
//! flow moves the profile rigidly iff `P = c(s)·A` (pure rotation) or
//! `P = c(s)·A'` (pure translation).

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::diffpoly::{DiffPoly, Symbol};
use crate::rational::ratio_to_f64;

/// Monomial `s^i A^p A'^q`.
type Key = (u32, u32, u32);

#[derive(Clone, Debug, Default, PartialEq)]
struct SechPoly(BTreeMap<Key, BigRational>);

impl SechPoly {
    fn one() -> Self {
        let mut m = BTreeMap::new();
        m.insert((0, 0, 0), BigRational::one());
        Self(m)
    }

    fn add_term(&mut self, k: Key, c: BigRational) {
        let e = self.0.entry(k).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&k);
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                out.add_term((a.0 + b.0, a.1 + b.1, a.2 + b.2), ca * cb);
            }
        }
        out.reduce()
    }

    /// Rewrites `A'^q` with `q ≥ 2` through `A'² = sA² − A⁴`.
    fn reduce(self) -> Self {
        let mut work: Vec<(Key, BigRational)> = self.0.into_iter().collect();
        let mut out = Self::default();
        while let Some(((i, p, q), c)) = work.pop() {
            if q < 2 {
                out.add_term((i, p, q), c);
            } else {
                work.push(((i + 1, p + 2, q - 2), c.clone()));
                work.push(((i, p + 4, q - 2), -c));
            }
        }
        out
    }

    fn dx(&self) -> Self {
        let mut out = Self::default();
        for (&(i, p, q), c) in &self.0 {
            if p > 0 {
                out.add_term((i, p - 1, q + 1), c * BigRational::from_integer(p.into()));
            }
            if q > 0 {
                let qc = c * BigRational::from_integer(q.into());
                out.add_term((i + 1, p + 1, q - 1), qc.clone());
                out.add_term((i, p + 3, q - 1), -qc * BigRational::from_integer(2.into()));
            }
        }
        out.reduce()
    }
}

/// What a flow does to the profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SechMotion {
    /// Phase rotation `e^{iω t_k}`.
    Rotation,
    /// Translation with velocity `v`.
    Translation,
}

/// `ω_k(s)` or `v_k(s)` as a polynomial in `s = a²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SechLaw {
    pub k: usize,
    pub motion: SechMotion,
    /// Coefficients in increasing powers of `s`.
    pub coeffs: Vec<BigRational>,
}

impl SechLaw {
    pub fn eval(&self, a: f64) -> f64 {
        let s = a * a;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + ratio_to_f64(c))
    }
}

fn into_poly(map: BTreeMap<u32, BigRational>) -> Vec<BigRational> {
    let deg = map.keys().max().copied().unwrap_or(0) as usize;
    let mut v = vec![BigRational::zero(); deg + 1];
    for (i, c) in map {
        v[i as usize] = c;
    }
    v
}

/// Reduces `h` (a ψ-flow `ψ_t = i^k h`) on the sech profile. Returns `None`
/// when the flow does not move the profile rigidly.
pub fn sech_flow_law(k: usize, h: &DiffPoly) -> Option<SechLaw> {
    let mut derivs = vec![{
        let mut m = BTreeMap::new();
        m.insert((0, 1, 0), BigRational::one());
        SechPoly(m)
    }];
    let mut total = SechPoly::default();
    for term in h.terms() {
        if !term.coeff.is_real() {
            return None;
        }
        let mut charge = 0i64;
        let mut prod = SechPoly::one();
        for &(jet, e) in term.factors.as_slice() {
            match jet.symbol {
                Symbol::Psi => charge += e as i64,
                Symbol::PsiBar => charge -= e as i64,
                _ => return None,
            }
            while derivs.len() <= jet.order as usize {
                let next = derivs.last().expect("seeded").dx();
                derivs.push(next);
            }
            for _ in 0..e {
                prod = prod.mul(&derivs[jet.order as usize]);
            }
        }
        if charge != 1 {
            return None;
        }
        for (key, c) in prod.0 {
            total.add_term(key, c * term.coeff.re());
        }
    }
    let mut on_a = BTreeMap::new();
    let mut on_ap = BTreeMap::new();
    for ((i, p, q), c) in total.0 {
        match (p, q) {
            (1, 0) => {
                on_a.insert(i, c);
            }
            (0, 1) => {
                on_ap.insert(i, c);
            }
            _ => return None,
        }
    }
    // ψ_t = i^k P e^{iθ}: rotation needs i^k real-times-i, translation i^k real.
    let unit = match k % 4 {
        0 => 1,
        1 => 1,
        2 => -1,
        _ => -1,
    };
    let sign = BigRational::from_integer(unit.into());
    match (on_a.is_empty(), on_ap.is_empty()) {
        (true, true) => None,
        (false, true) if k % 2 == 1 => Some(SechLaw {
            k,
            motion: SechMotion::Rotation,
            // iω A = i^k c A  ⇒  ω = i^{k−1} c
            coeffs: into_poly(on_a).into_iter().map(|c| c * &sign).collect(),
        }),
        (true, false) if k % 2 == 0 => Some(SechLaw {
            k,
            motion: SechMotion::Translation,
            // −v A' = i^k c A'  ⇒  v = −i^k c
            coeffs: into_poly(on_ap).into_iter().map(|c| -(c * &sign)).collect(),
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::standard_table;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn reduction_rules_match_numerics() {
        // A''' from the symbolic rules against the closed-form sech.
        let a = 1.7;
        let mut d = SechPoly(BTreeMap::from([((0, 1, 0), BigRational::one())]));
        for _ in 0..3 {
            d = d.dx();
        }
        let xi: f64 = 0.37;
        let t = (a * xi).tanh();
        let amp = a * sech(a * xi);
        let ap = -a * amp * t;
        let mut val = 0.0;
        for ((i, p, q), c) in &d.0 {
            val += ratio_to_f64(c) * (a * a).powi(*i as i32) * amp.powi(*p as i32) * ap.powi(*q as i32);
        }
        let h = 1e-3;
        let f = |x: f64| a * sech(a * x);
        let fd3 = (f(xi + 2.0 * h) - 2.0 * f(xi + h) + 2.0 * f(xi - h) - f(xi - 2.0 * h)) / (2.0 * h * h * h);
        assert!((val - fd3).abs() < 1e-4, "{val} vs {fd3}");
    }

    #[test]
    fn first_two_flows_by_hand() {
        // H_1(A) = A'' + 2A³ = sA ; H_2(A) = A''' + 6A²A' = sA'.
        let t = standard_table();
        let l1 = sech_flow_law(1, t.scalar_h(1).unwrap()).unwrap();
        assert_eq!(l1.motion, SechMotion::Rotation);
        assert_eq!(l1.eval(2.0), 4.0);
        let l2 = sech_flow_law(2, t.scalar_h(2).unwrap()).unwrap();
        assert_eq!(l2.motion, SechMotion::Translation);
        assert_eq!(l2.eval(2.0), 4.0);
    }

    #[test]
    fn nonrigid_flows_are_rejected() {
        assert!(sech_flow_law(1, &DiffPoly::psi(0).pow(2)).is_none());
        assert!(sech_flow_law(1, &DiffPoly::psi(1)).is_none());
    }
}
