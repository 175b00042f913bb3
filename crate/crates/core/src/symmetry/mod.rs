//! Scaling–Galilean symmetries of the hierarchy.
//!
//! For `(a, b)` a solution `ψ(x, t_1, …, t_M)` maps to
//! `a ψ(X, T_1, …, T_M) exp{−2ibx − i Σ_m (2b)^{m+1} t_m}` with
//!
//! ```text
//! X   = a (x + Σ_m C(m+1, 1) (2b)^m t_m)
//! T_j = a^{j+1} (t_j + Σ_{m>j} C(m+1, j+1) (2b)^{m−j} t_m)
//! ```
//!
//! Composition follows the affine action `λ ↦ aλ + b` on the spectral
//! parameter: `(a₁, b₁)` then `(a₂, b₂)` is `(a₁a₂, a₂b₁ + b₂)`.

mod identities;

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::evolve::FlowSpec;
use crate::hierarchy::STANDARD_ORDER;
use crate::solutions::{time_k, Ray, Sampler, SharedSampler, SolutionError};

pub use identities::{argument_identity_error, k_reduction_error, phase_identity_error, IdentityReport};

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error("scale a must be finite and nonzero, got {0}")]
    BadScale(f64),
    #[error("boost b must be finite, got {0}")]
    BadBoost(f64),
    #[error("{got} times exceed the supported {max}")]
    TooManyTimes { got: usize, max: usize },
    #[error("flow order {0} outside 1..=5")]
    BadFlow(usize),
    #[error(transparent)]
    Solution(#[from] SolutionError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryParams {
    a: f64,
    b: f64,
}

impl SymmetryParams {
    /// Negative `a` composes the scaling with the parity `x ↦ −x`.
    pub fn new(a: f64, b: f64) -> Result<Self, SymmetryError> {
        if a == 0.0 || !a.is_finite() {
            return Err(SymmetryError::BadScale(a));
        }
        if !b.is_finite() {
            return Err(SymmetryError::BadBoost(b));
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SymmetryParams) -> SymmetryParams {
        SymmetryParams {
            a: self.a * next.a,
            b: next.a * self.b + next.b,
        }
    }
}

pub(crate) fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_len(m: usize) -> Result<(), SymmetryError> {
    if m > STANDARD_ORDER {
        Err(SymmetryError::TooManyTimes {
            got: m,
            max: STANDARD_ORDER,
        })
    } else {
        Ok(())
    }
}

fn arguments(p: &SymmetryParams, x: f64, times: &[f64]) -> (f64, Vec<f64>) {
    let tb = 2.0 * p.b;
    let m = times.len();
    let mut xs = x;
    for (i, t) in times.iter().enumerate() {
        let mm = i + 1;
        xs += binom(mm + 1, 1) * tb.powi(mm as i32) * t;
    }
    let big_t = (1..=m)
        .map(|j| {
            let mut s = times[j - 1];
            for mm in j + 1..=m {
                s += binom(mm + 1, j + 1) * tb.powi((mm - j) as i32) * times[mm - 1];
            }
            p.a.powi(j as i32 + 1) * s
        })
        .collect();
    (p.a * xs, big_t)
}

fn phase(p: &SymmetryParams, x: f64, times: &[f64]) -> Complex64 {
    let tb = 2.0 * p.b;
    let mut e = -2.0 * p.b * x;
    for (i, t) in times.iter().enumerate() {
        e -= tb.powi(i as i32 + 2) * t;
    }
    Complex64::new(0.0, e).exp()
}

/// `(X, T_1, …, T_M)` for `M = times.len()`.
pub fn transform_arguments(p: &SymmetryParams, x: f64, times: &[f64]) -> Result<(f64, Vec<f64>), SymmetryError> {
    check_len(times.len())?;
    Ok(arguments(p, x, times))
}

/// `exp{−2ibx − i Σ_m (2b)^{m+1} t_m}`.
pub fn phase_factor(p: &SymmetryParams, x: f64, times: &[f64]) -> Result<Complex64, SymmetryError> {
    check_len(times.len())?;
    Ok(phase(p, x, times))
}

/// Arguments along the ray `t_m = b_m t` (constant-coefficient mixed flow).
pub fn mixed_arguments(p: &SymmetryParams, x: f64, coeffs: &[f64], t: f64) -> Result<(f64, Vec<f64>), SymmetryError> {
    let times: Vec<f64> = coeffs.iter().map(|c| c * t).collect();
    transform_arguments(p, x, &times)
}

/// Arguments and phase at the deformed times `t_m = α_m(t)`.
pub fn deformed_arguments(
    p: &SymmetryParams,
    x: f64,
    spec: &FlowSpec,
    t: f64,
) -> Result<(f64, Vec<f64>, Complex64), SymmetryError> {
    let times = spec.times_at(t);
    let (xx, tt) = transform_arguments(p, x, &times)?;
    Ok((xx, tt, phase(p, x, &times)))
}

/// `a s(X, T) · phase`, declared at the order of `s`.
pub struct Transformed {
    inner: SharedSampler,
    p: SymmetryParams,
}

impl Sampler for Transformed {
    fn name(&self) -> String {
        format!("transform(a={}, b={}; {})", self.p.a, self.p.b, self.inner.name())
    }

    fn order(&self) -> usize {
        self.inner.order()
    }

    fn eval(&self, x: f64, times: &[f64]) -> Complex64 {
        let mut full = times.to_vec();
        full.resize(self.inner.order().max(times.len()), 0.0);
        let (xx, tt) = arguments(&self.p, x, &full);
        self.p.a * self.inner.eval(xx, &tt) * phase(&self.p, x, &full)
    }
}

pub fn transform_solution(s: SharedSampler, p: SymmetryParams) -> Transformed {
    Transformed { inner: s, p }
}

/// `q s(qx, …, q^{n+1} t_n, …)` acting on flow `n` alone; the other times
/// are passed through unchanged.
pub struct Scaled {
    inner: SharedSampler,
    n: usize,
    q: f64,
}

impl Sampler for Scaled {
    fn name(&self) -> String {
        format!("scale(n={}, q={}; {})", self.n, self.q, self.inner.name())
    }

    fn order(&self) -> usize {
        self.inner.order()
    }

    fn eval(&self, x: f64, times: &[f64]) -> Complex64 {
        let mut tt = times.to_vec();
        tt.resize(tt.len().max(self.n), 0.0);
        tt[self.n - 1] *= self.q.powi(self.n as i32 + 1);
        self.q * self.inner.eval(self.q * x, &tt)
    }
}

pub fn scaling(n: usize, q: f64, s: SharedSampler) -> Result<Scaled, SymmetryError> {
    if n == 0 || n > s.order() {
        return Err(SymmetryError::BadFlow(n));
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(SymmetryError::BadScale(q));
    }
    Ok(Scaled { inner: s, n, q })
}

/// The explicit Hirota-ray transform
/// `a ψ(ax + 4[α−3bβ]abt, [α−6bβ]a²t, −βa³t) exp{−2ibx − 4i(α−2βb)b²t}`.
pub struct HirotaClosedForm {
    inner: SharedSampler,
    p: SymmetryParams,
    alpha: f64,
    beta: f64,
}

impl Sampler for HirotaClosedForm {
    fn name(&self) -> String {
        format!(
            "hirota(a={}, b={}, alpha={}, beta={}; {})",
            self.p.a,
            self.p.b,
            self.alpha,
            self.beta,
            self.inner.name()
        )
    }

    fn order(&self) -> usize {
        1
    }

    fn eval(&self, x: f64, times: &[f64]) -> Complex64 {
        let t = time_k(times, 1);
        let (a, b, al, be) = (self.p.a, self.p.b, self.alpha, self.beta);
        let xx = a * x + 4.0 * (al - 3.0 * b * be) * a * b * t;
        let t1 = (al - 6.0 * b * be) * a * a * t;
        let t2 = -be * a * a * a * t;
        let ph = Complex64::new(0.0, -2.0 * b * x - 4.0 * (al - 2.0 * be * b) * b * b * t).exp();
        a * self.inner.eval(xx, &[t1, t2]) * ph
    }
}

pub fn hirota_closed_form(
    a: f64,
    b: f64,
    alpha: f64,
    beta: f64,
    s: SharedSampler,
) -> Result<HirotaClosedForm, SymmetryError> {
    if s.order() < 2 {
        return Err(SymmetryError::BadFlow(2));
    }
    Ok(HirotaClosedForm {
        inner: s,
        p: SymmetryParams::new(a, b)?,
        alpha,
        beta,
    })
}

/// The generic route to the same Hirota solution: transform, then restrict
/// to the ray `(t_1, t_2) = (αt, −βt)`.
pub fn hirota_generic(a: f64, b: f64, alpha: f64, beta: f64, s: SharedSampler) -> Result<Ray, SymmetryError> {
    let tr: SharedSampler = Arc::new(transform_solution(s, SymmetryParams::new(a, b)?));
    Ok(Ray::new(tr, &[alpha, -beta])?)
}
