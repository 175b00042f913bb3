//! Periodic grids, Fourier differentiation and grid evaluation of
//! differential polynomials.

mod io;
mod plan;

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::evolve::FlowSpec;
use crate::hierarchy::{standard_table, FlowTable, HierarchyError, STANDARD_ORDER};

pub use io::{read_field, read_field_file, write_field, write_field_file, FieldIoError};
pub use plan::{compile_plan, EvalPlan, PlanFactor, PlanTerm};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid size {0} must be a power of two and at least 16")]
    BadSize(usize),
    #[error("grid length {0} must be finite and positive")]
    BadLength(f64),
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("snapshot times must be equally spaced and increasing: {0:?}")]
    TimeMismatch([f64; 3]),
    #[error("plan input must contain only psi/psibar jets, found {0}")]
    UnreducedInput(crate::diffpoly::Jet),
    #[error("flow order {k} exceeds the supported order {max}")]
    FlowOrder { k: usize, max: usize },
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

/// Uniform periodic grid with nodes `x_j = jL/n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self, SpectralError> {
        if n < 16 || !n.is_power_of_two() {
            return Err(SpectralError::BadSize(n));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(SpectralError::BadLength(length));
        }
        Ok(Self { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.length / self.n as f64
    }

    /// Node position mapped into `[−L/2, L/2)`; the representative used when
    /// sampling closed-form solutions defined on the whole line.
    pub fn centered_node(&self, j: usize) -> f64 {
        if j < self.n / 2 {
            self.node(j)
        } else {
            self.node(j) - self.length
        }
    }

    /// Signed mode number of FFT bin `j`, in `[−n/2, n/2)`.
    pub fn mode(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Angular wavenumber `2πm/L` of bin `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI * self.mode(j) as f64 / self.length
    }

    pub fn max_wavenumber(&self) -> f64 {
        PI * self.n as f64 / self.length
    }
}

/// Samples of ψ on a grid at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
    time: f64,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>, time: f64) -> Result<Self, SpectralError> {
        if values.len() != grid.n() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.n(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(SpectralError::NonFinite { index });
        }
        Ok(Self { grid, values, time })
    }

    /// Samples `f` at the centered node positions.
    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(f64) -> Complex64) -> Result<Self, SpectralError> {
        let values = (0..grid.n()).map(|j| f(grid.centered_node(j))).collect();
        Self::new(grid, values, time)
    }

    pub fn zeros(grid: Grid, time: f64) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n()],
            time,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `max_j |a_j − b_j|`.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        max_abs_diff(&self.values, &other.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// FFT plans and wavenumbers for one grid. Each instance owns its
/// workspaces; create one per run or per thread.
pub struct Spectral {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.n()),
            inverse: planner.plan_fft_inverse(grid.n()),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform including the `1/n` normalization.
    pub fn inverse(&self, hat: &[Complex64]) -> Vec<Complex64> {
        let mut buf = hat.to_vec();
        self.inverse.process(&mut buf);
        let s = 1.0 / self.grid.n() as f64;
        buf.iter_mut().for_each(|v| *v *= s);
        buf
    }

    /// `(iξ)^order` for bin `j`, with the Nyquist bin zeroed for odd orders.
    pub fn multiplier(&self, j: usize, order: u32) -> Complex64 {
        if order == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if order % 2 == 1 && j == self.grid.n() / 2 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(0.0, self.grid.wavenumber(j)).powu(order)
    }

    fn dealiased(&self, j: usize) -> bool {
        3 * self.grid.mode(j).unsigned_abs() as usize > self.grid.n()
    }

    /// Derivative of order `order` given the forward transform.
    pub fn derivative_from_hat(&self, hat: &[Complex64], order: u32, dealias: bool) -> Vec<Complex64> {
        let scaled: Vec<Complex64> = hat
            .iter()
            .enumerate()
            .map(|(j, h)| {
                if dealias && self.dealiased(j) {
                    Complex64::new(0.0, 0.0)
                } else {
                    h * self.multiplier(j, order)
                }
            })
            .collect();
        self.inverse(&scaled)
    }

    pub fn derivative(&self, values: &[Complex64], order: u32) -> Vec<Complex64> {
        if order == 0 {
            return values.to_vec();
        }
        self.derivative_from_hat(&self.forward(values), order, false)
    }

    /// ψ-jets of the requested orders, in the same order as `orders`.
    pub fn jets(&self, values: &[Complex64], orders: &[u32], dealias: bool) -> Vec<Vec<Complex64>> {
        let needs_hat = dealias || orders.iter().any(|&o| o > 0);
        let hat = if needs_hat { self.forward(values) } else { Vec::new() };
        orders
            .iter()
            .map(|&o| {
                if o == 0 && !dealias {
                    values.to_vec()
                } else {
                    self.derivative_from_hat(&hat, o, dealias)
                }
            })
            .collect()
    }

    /// Pointwise value of the plan's polynomial on the grid.
    pub fn eval(&self, plan: &EvalPlan, values: &[Complex64], dealias: bool) -> Vec<Complex64> {
        let jets = self.jets(values, plan.jet_orders(), dealias);
        plan.evaluate_with_jets(&jets, values.len())
    }
}

/// Fourier derivative of a field.
pub fn spectral_derivative(f: &Field, order: u32) -> Vec<Complex64> {
    Spectral::new(*f.grid()).derivative(f.values(), order)
}

/// Evaluates a compiled plan on a field.
pub fn eval_rhs(plan: &EvalPlan, f: &Field, dealias: bool) -> Vec<Complex64> {
    Spectral::new(*f.grid()).eval(plan, f.values(), dealias)
}

/// Compiled `H_k` from the shared table.
pub fn flow_plan(k: usize) -> Result<&'static EvalPlan, SpectralError> {
    static PLANS: OnceLock<Vec<EvalPlan>> = OnceLock::new();
    if k == 0 || k > STANDARD_ORDER {
        return Err(SpectralError::FlowOrder { k, max: STANDARD_ORDER });
    }
    let plans = PLANS.get_or_init(|| {
        let table = standard_table();
        (1..=STANDARD_ORDER)
            .map(|k| compile_plan(table.scalar_h(k).expect("in range")).expect("reduced"))
            .collect()
    });
    Ok(&plans[k - 1])
}

/// `Σ_k i^k α'_k(t) H_k(ψ)` on the grid.
pub fn flow_rhs_values(
    ctx: &Spectral,
    values: &[Complex64],
    spec: &FlowSpec,
    t: f64,
    dealias: bool,
) -> Result<Vec<Complex64>, SpectralError> {
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for (k, schedule) in spec.entries() {
        let rate = schedule.derivative(t);
        if rate == 0.0 {
            continue;
        }
        let weight = i_pow(*k) * rate;
        let h = ctx.eval(flow_plan(*k)?, values, dealias);
        out.iter_mut().zip(&h).for_each(|(o, v)| *o += weight * v);
    }
    Ok(out)
}

pub(crate) fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// L∞ norm of `ψ_t − Σ_k i^k α'_k(t) H_k(ψ)`, with `ψ_t` from the centered
/// difference of the outer snapshots and the flow evaluated on the middle one.
pub fn residual(f_minus: &Field, f0: &Field, f_plus: &Field, spec: &FlowSpec) -> Result<f64, SpectralError> {
    let r = pointwise_residual(f_minus, f0, f_plus, spec)?;
    Ok(r.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

/// Pointwise version of [`residual`].
pub fn pointwise_residual(
    f_minus: &Field,
    f0: &Field,
    f_plus: &Field,
    spec: &FlowSpec,
) -> Result<Vec<Complex64>, SpectralError> {
    if f_minus.grid() != f0.grid() || f_plus.grid() != f0.grid() {
        return Err(SpectralError::GridMismatch);
    }
    let times = [f_minus.time(), f0.time(), f_plus.time()];
    let (d1, d2) = (times[1] - times[0], times[2] - times[1]);
    let scale = times.iter().fold(1.0f64, |m, t| m.max(t.abs()));
    if !(d1 > 0.0 && d2 > 0.0) || (d1 - d2).abs() > 1e-9 * scale {
        return Err(SpectralError::TimeMismatch(times));
    }
    let delta = 0.5 * (times[2] - times[0]);
    let ctx = Spectral::new(*f0.grid());
    let rhs = flow_rhs_values(&ctx, f0.values(), spec, times[1], false)?;
    Ok(f_plus
        .values()
        .iter()
        .zip(f_minus.values())
        .zip(&rhs)
        .map(|((p, m), r)| (p - m) / (2.0 * delta) - r)
        .collect())
}

/// `L · mean(density_k(ψ))`, spectrally accurate for smooth periodic ψ.
pub fn conserved_integral(f: &Field, table: &FlowTable, k: usize) -> Result<Complex64, SpectralError> {
    let plan = compile_plan(&table.conserved_density(k)?)?;
    Ok(conserved_integral_with(&Spectral::new(*f.grid()), &plan, f.values()))
}

pub(crate) fn conserved_integral_with(ctx: &Spectral, plan: &EvalPlan, values: &[Complex64]) -> Complex64 {
    let d = ctx.eval(plan, values, false);
    let n = d.len() as f64;
    d.iter().sum::<Complex64>() / n * ctx.grid().length()
}
