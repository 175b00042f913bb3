//! Closed-form multi-time solutions and finite-gap (theta-function) data.
//!
//! A [`Sampler`] evaluates `ψ(x, t_1, …, t_M)`. Missing trailing times are
//! zero.

mod analytic;
mod riemann;
mod sech;
mod theta;

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::evolve::FlowSpec;
use crate::spectral::{residual, Field, Grid, SpectralError};

pub use analytic::{MAX_SAMPLER_ORDER, peregrine, plane_wave, plane_wave_frequency, soliton, PlaneWave, Peregrine, Soliton};
pub use riemann::{finite_gap_sample, moduli_transform, FiniteGap, RiemannData};
pub use sech::{sech_flow_law, SechLaw, SechMotion};
pub use theta::{theta, RiemannMatrix, ThetaEvaluator, ThetaValue, DEFAULT_THETA_TOL};

#[derive(Debug, Error)]
pub enum SolutionError {
    #[error("{got} times given to a sampler of order {order}")]
    TooManyTimes { got: usize, order: usize },
    #[error("flow order {requested} exceeds the supported {max}")]
    OrderTooHigh { requested: usize, max: usize },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("imaginary part of the Riemann matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("Riemann matrix is not symmetric (|B - B^T| = {0:e})")]
    NotSymmetric(f64),
    #[error("theta tolerance must lie in (0, 1e-6], got {0}")]
    BadTolerance(f64),
    #[error("invalid Riemann data: {0}")]
    InvalidData(String),
    #[error("denominator theta vanishes at x = {x}")]
    ThetaZeroDivision { x: f64 },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `ψ(x, t_1, …, t_M)` for a fixed declared order `M`.
pub trait Sampler: Send + Sync {
    fn name(&self) -> String;

    /// Highest flow time the sampler solves jointly.
    fn order(&self) -> usize;

    /// Unchecked evaluation; `times.len()` must not exceed `order()`.
    fn eval(&self, x: f64, times: &[f64]) -> Complex64;

    fn sample(&self, x: f64, times: &[f64]) -> Result<Complex64, SolutionError> {
        if times.len() > self.order() {
            return Err(SolutionError::TooManyTimes {
                got: times.len(),
                order: self.order(),
            });
        }
        Ok(self.eval(x, times))
    }
}

pub type SharedSampler = Arc<dyn Sampler>;

pub(crate) fn time_k(times: &[f64], k: usize) -> f64 {
    times.get(k - 1).copied().unwrap_or(0.0)
}

/// Samples `s` at the centered grid nodes. The field is stamped with
/// `field_time`.
pub fn sample_field(s: &dyn Sampler, grid: Grid, times: &[f64], field_time: f64) -> Result<Field, SolutionError> {
    if times.len() > s.order() {
        return Err(SolutionError::TooManyTimes {
            got: times.len(),
            order: s.order(),
        });
    }
    Ok(Field::from_fn(grid, field_time, |x| s.eval(x, times))?)
}

/// Residual of `s` under the pure flow `k`, from samples at `t_k ± delta`
/// around `times` (other times held fixed).
pub fn flow_residual(s: &dyn Sampler, k: usize, grid: Grid, times: &[f64], delta: f64) -> Result<f64, SolutionError> {
    if k == 0 || k > s.order() {
        return Err(SolutionError::OrderTooHigh {
            requested: k,
            max: s.order(),
        });
    }
    let mut t = times.to_vec();
    t.resize(t.len().max(k), 0.0);
    let centre = t[k - 1];
    let mut fields = Vec::with_capacity(3);
    for tk in [centre - delta, centre, centre + delta] {
        t[k - 1] = tk;
        fields.push(sample_field(s, grid, &t, tk)?);
    }
    let spec = FlowSpec::single(k).map_err(|e| SolutionError::BadParameter(e.to_string()))?;
    Ok(residual(&fields[0], &fields[1], &fields[2], &spec)?)
}

/// `ψ(x, t) = s(x, c_1 t, …, c_M t)`: the solution along a ray of the
/// multi-time space, i.e. of the mixed equation with constant coefficients.
pub struct Ray {
    inner: SharedSampler,
    coeffs: Vec<f64>,
}

impl Ray {
    pub fn new(inner: SharedSampler, coeffs: &[f64]) -> Result<Self, SolutionError> {
        if coeffs.len() > inner.order() {
            return Err(SolutionError::TooManyTimes {
                got: coeffs.len(),
                order: inner.order(),
            });
        }
        Ok(Self {
            inner,
            coeffs: coeffs.to_vec(),
        })
    }
}

impl Sampler for Ray {
    fn name(&self) -> String {
        format!("ray({}; {:?})", self.inner.name(), self.coeffs)
    }

    fn order(&self) -> usize {
        1
    }

    fn eval(&self, x: f64, times: &[f64]) -> Complex64 {
        let t = time_k(times, 1);
        let tt: Vec<f64> = self.coeffs.iter().map(|c| c * t).collect();
        self.inner.eval(x, &tt)
    }
}

/// `ψ(x, t) = s(x, α_1(t), …, α_M(t))`: the solution of the deformed
/// equation with schedules `α_k`.
pub struct Scheduled {
    inner: SharedSampler,
    spec: FlowSpec,
}

impl Scheduled {
    pub fn new(inner: SharedSampler, spec: FlowSpec) -> Result<Self, SolutionError> {
        if spec.max_order() > inner.order() {
            return Err(SolutionError::OrderTooHigh {
                requested: spec.max_order(),
                max: inner.order(),
            });
        }
        Ok(Self { inner, spec })
    }
}

impl Sampler for Scheduled {
    fn name(&self) -> String {
        format!("scheduled({})", self.inner.name())
    }

    fn order(&self) -> usize {
        1
    }

    fn eval(&self, x: f64, times: &[f64]) -> Complex64 {
        self.inner.eval(x, &self.spec.times_at(time_k(times, 1)))
    }
}
