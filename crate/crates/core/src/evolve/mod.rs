//! Time stepping of `ψ_t = Σ_k i^k α'_k(t) H_k(ψ)` on a periodic grid.
//!
//! Two integrators: classical RK4 on the full right-hand side, and an
//! integrating-factor RK4 that treats the linear part exactly. The latter
//! needs constant coefficients.

mod schedule;
mod trajectory;

use num_complex::Complex64;
use thiserror::Error;

use crate::diffpoly::{DiffPoly, Symbol};
use crate::hierarchy::standard_table;
use crate::spectral::{compile_plan, flow_plan, i_pow, EvalPlan, Field, Grid, Spectral, SpectralError};

pub use schedule::{FlowSpec, Schedule, ScheduleError};
pub use trajectory::{write_trajectory, ConservedRow, Snapshot, Trajectory, TrajectoryIoError};

/// RK4 stability bound on `dt · max|μ(ξ)|`.
pub const RK4_STABILITY_LIMIT: f64 = 2.8;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("dt·max|μ| = {number:.3} exceeds {limit}")]
    StabilityViolation { number: f64, limit: f64 },
    #[error("non-finite values at t = {time}")]
    Blowup { time: f64, last_good: Box<Field> },
    #[error("integrating-factor stepping needs linear schedules")]
    NonConstantSchedule,
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("flow {0} has a linear part in the conjugate field")]
    ConjugateLinearPart(usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
    IfRk4,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "ifrk4" => Ok(Method::IfRk4),
            other => Err(format!("unknown method '{other}' (rk4, ifrk4)")),
        }
    }
}

/// Degree-one part of `H_k` as a Fourier symbol: `H_k` linear in ψ is
/// `Σ c_n ψ^{(n)}`, with symbol `Σ c_n (iξ)^n`.
fn linear_part(k: usize) -> Result<(DiffPoly, DiffPoly), EvolveError> {
    let h = flow_plan(k)?.source();
    let lin = h.homogeneous_part(1);
    if lin.jets().iter().any(|j| j.symbol != Symbol::Psi) {
        return Err(EvolveError::ConjugateLinearPart(k));
    }
    Ok((lin.clone(), h - &lin))
}

fn symbol_of(lin: &DiffPoly, xi: f64) -> Complex64 {
    lin.terms()
        .iter()
        .map(|m| {
            let (jet, _) = m.factors.as_slice()[0];
            m.coeff.to_complex64() * Complex64::new(0.0, xi).powu(jet.order)
        })
        .sum()
}

/// `μ(ξ) = Σ_k i^k α'_k(t) L_k(ξ)`, with `L_k` the symbol of the linear part
/// of `H_k`. For the standard hierarchy `L_k(ξ) = (iξ)^{k+1}`.
pub fn linear_symbol(spec: &FlowSpec, t: f64, xi: f64) -> Result<Complex64, EvolveError> {
    let mut mu = Complex64::new(0.0, 0.0);
    for (k, s) in spec.entries() {
        let (lin, _) = linear_part(*k)?;
        mu += i_pow(*k) * s.derivative(t) * symbol_of(&lin, xi);
    }
    Ok(mu)
}

struct FlowTerm {
    k: usize,
    schedule: Schedule,
    /// `L_k(ξ_j)` per bin.
    symbol: Vec<Complex64>,
    full: &'static EvalPlan,
    nonlinear: EvalPlan,
}

/// A configured stepper for one grid and one flow mix.
pub struct Integrator {
    ctx: Spectral,
    spec: FlowSpec,
    method: Method,
    dealias: bool,
    terms: Vec<FlowTerm>,
    conserved: Vec<EvalPlan>,
}

impl Integrator {
    pub fn new(grid: Grid, spec: FlowSpec, method: Method) -> Result<Self, EvolveError> {
        if method == Method::IfRk4 && !spec.is_constant() {
            return Err(EvolveError::NonConstantSchedule);
        }
        let mut terms = Vec::new();
        for (k, s) in spec.entries() {
            let (lin, nl) = linear_part(*k)?;
            let symbol = (0..grid.n()).map(|j| symbol_of(&lin, grid.wavenumber(j))).collect();
            terms.push(FlowTerm {
                k: *k,
                schedule: s.clone(),
                symbol,
                full: flow_plan(*k)?,
                nonlinear: compile_plan(&nl)?,
            });
        }
        let table = standard_table();
        let conserved = (1..=3)
            .map(|k| Ok(compile_plan(&table.conserved_density(k).map_err(SpectralError::from)?)?))
            .collect::<Result<Vec<_>, EvolveError>>()?;
        Ok(Self {
            ctx: Spectral::new(grid),
            spec,
            method,
            dealias: false,
            terms,
            conserved,
        })
    }

    /// IFRK4 for constant coefficients, RK4 otherwise.
    pub fn with_default_method(grid: Grid, spec: FlowSpec) -> Result<Self, EvolveError> {
        let m = if spec.is_constant() { Method::IfRk4 } else { Method::Rk4 };
        Self::new(grid, spec, m)
    }

    /// Two-thirds dealiasing of every derivative feeding the nonlinearity.
    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn spec(&self) -> &FlowSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        self.ctx.grid()
    }

    fn mu(&self, j: usize, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|ft| i_pow(ft.k) * ft.schedule.derivative(t) * ft.symbol[j])
            .sum()
    }

    /// `dt · max_ξ |μ(ξ)|`, maximized over the stage times of one step.
    pub fn stability_number(&self, t: f64, dt: f64) -> f64 {
        let mut worst = 0.0f64;
        for s in [t, t + 0.5 * dt, t + dt] {
            for j in 0..self.grid().n() {
                worst = worst.max(self.mu(j, s).norm());
            }
        }
        dt * worst
    }

    fn rhs(&self, values: &[Complex64], t: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
        for ft in &self.terms {
            let rate = ft.schedule.derivative(t);
            if rate == 0.0 {
                continue;
            }
            let w = i_pow(ft.k) * rate;
            let h = self.ctx.eval(ft.full, values, self.dealias);
            out.iter_mut().zip(&h).for_each(|(o, v)| *o += w * v);
        }
        out
    }

    /// Fourier transform of the nonlinear remainder at state `hat`.
    fn nonlinear_hat(&self, hat: &[Complex64]) -> Vec<Complex64> {
        let values = self.ctx.inverse(hat);
        let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
        for ft in &self.terms {
            let w = i_pow(ft.k) * ft.schedule.derivative(0.0);
            if w == Complex64::new(0.0, 0.0) || ft.nonlinear.terms().is_empty() {
                continue;
            }
            let h = self.ctx.eval(&ft.nonlinear, &values, self.dealias);
            out.iter_mut().zip(&h).for_each(|(o, v)| *o += w * v);
        }
        self.ctx.forward(&out)
    }

    fn rk4(&self, u: &[Complex64], t: f64, dt: f64) -> Vec<Complex64> {
        let axpy = |a: &[Complex64], s: f64, b: &[Complex64]| -> Vec<Complex64> {
            a.iter().zip(b).map(|(x, y)| x + s * y).collect()
        };
        let k1 = self.rhs(u, t);
        let k2 = self.rhs(&axpy(u, 0.5 * dt, &k1), t + 0.5 * dt);
        let k3 = self.rhs(&axpy(u, 0.5 * dt, &k2), t + 0.5 * dt);
        let k4 = self.rhs(&axpy(u, dt, &k3), t + dt);
        (0..u.len())
            .map(|i| u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    }

    fn ifrk4(&self, u: &[Complex64], dt: f64) -> Vec<Complex64> {
        let n = u.len();
        let hat = self.ctx.forward(u);
        let (e_half, e_full): (Vec<Complex64>, Vec<Complex64>) = (0..n)
            .map(|j| {
                let mu = self.mu(j, 0.0);
                ((mu * (0.5 * dt)).exp(), (mu * dt).exp())
            })
            .unzip();
        let k1 = self.nonlinear_hat(&hat);
        let a: Vec<_> = (0..n).map(|j| e_half[j] * (hat[j] + 0.5 * dt * k1[j])).collect();
        let k2 = self.nonlinear_hat(&a);
        let b: Vec<_> = (0..n).map(|j| e_half[j] * hat[j] + 0.5 * dt * k2[j]).collect();
        let k3 = self.nonlinear_hat(&b);
        let c: Vec<_> = (0..n).map(|j| e_full[j] * hat[j] + dt * e_half[j] * k3[j]).collect();
        let k4 = self.nonlinear_hat(&c);
        let next: Vec<_> = (0..n)
            .map(|j| {
                e_full[j] * hat[j]
                    + dt / 6.0 * (e_full[j] * k1[j] + 2.0 * e_half[j] * (k2[j] + k3[j]) + k4[j])
            })
            .collect();
        self.ctx.inverse(&next)
    }

    /// One step of size `dt` from `f`.
    pub fn step(&self, f: &Field, dt: f64) -> Result<Field, EvolveError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(EvolveError::BadStep(dt));
        }
        if f.grid() != self.grid() {
            return Err(SpectralError::GridMismatch.into());
        }
        let t = f.time();
        let values = match self.method {
            Method::Rk4 => {
                let number = self.stability_number(t, dt);
                if number > RK4_STABILITY_LIMIT {
                    return Err(EvolveError::StabilityViolation {
                        number,
                        limit: RK4_STABILITY_LIMIT,
                    });
                }
                self.rk4(f.values(), t, dt)
            }
            Method::IfRk4 => self.ifrk4(f.values(), dt),
        };
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(EvolveError::Blowup {
                time: t + dt,
                last_good: Box::new(f.clone()),
            });
        }
        Ok(Field::new(*self.grid(), values, t + dt)?)
    }

    /// Integrals of the first three conserved densities.
    pub fn conserved(&self, f: &Field) -> [Complex64; 3] {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (o, plan) in out.iter_mut().zip(&self.conserved) {
            let d = self.ctx.eval(plan, f.values(), false);
            *o = d.iter().sum::<Complex64>() / d.len() as f64 * self.grid().length();
        }
        out
    }

    /// Integrates from `f0.time()` to `t_end`. Steps are shortened to land
    /// exactly on each requested time; snapshots are kept at the start, at
    /// every requested time, every `every` steps if set, and at the end.
    pub fn run(&self, f0: &Field, t_end: f64, dt: f64, observers: &Observers) -> Result<Trajectory, EvolveError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(EvolveError::BadStep(dt));
        }
        let t0 = f0.time();
        let mut targets: Vec<f64> = observers
            .times
            .iter()
            .copied()
            .filter(|&s| s > t0 && s < t_end)
            .collect();
        targets.push(t_end);
        targets.sort_by(f64::total_cmp);
        targets.dedup();

        let mut traj = Trajectory::default();
        let record = |traj: &mut Trajectory, step: usize, f: &Field| {
            traj.conserved.push(ConservedRow {
                t: f.time(),
                values: self.conserved(f),
            });
            traj.snapshots.push(Snapshot { step, field: f.clone() });
        };
        let mut f = f0.clone();
        let mut step = 0usize;
        record(&mut traj, 0, &f);
        if t_end <= t0 {
            return Ok(traj);
        }
        let tiny = 1e-9 * dt;
        for &target in &targets {
            while f.time() < target - tiny {
                let remaining = target - f.time();
                let h = if remaining <= dt + tiny { remaining } else { dt };
                let next = self.step(&f, h)?;
                f = if remaining <= dt + tiny { next.with_time(target) } else { next };
                step += 1;
                let at_target = f.time() == target;
                let periodic = observers.every.is_some_and(|e| e > 0 && step % e == 0);
                if at_target || periodic {
                    record(&mut traj, step, &f);
                }
            }
        }
        Ok(traj)
    }
}

/// When to keep snapshots during a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Observers {
    pub times: Vec<f64>,
    pub every: Option<usize>,
}

impl Observers {
    pub fn at(times: &[f64]) -> Self {
        Self {
            times: times.to_vec(),
            every: None,
        }
    }

    pub fn every(n: usize) -> Self {
        Self {
            times: Vec::new(),
            every: Some(n),
        }
    }
}

/// Single step with an explicit method.
pub fn step(f: &Field, spec: &FlowSpec, dt: f64, method: Method) -> Result<Field, EvolveError> {
    Integrator::new(*f.grid(), spec.clone(), method)?.step(f, dt)
}

/// Full run with the default method for `spec`.
pub fn evolve_run(
    f0: &Field,
    spec: &FlowSpec,
    t_end: f64,
    dt: f64,
    observers: &Observers,
) -> Result<Trajectory, EvolveError> {
    Integrator::with_default_method(*f0.grid(), spec.clone())?.run(f0, t_end, dt, observers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn linear_parts_are_pure_derivatives() {
        for k in 1..=6 {
            let (lin, _) = linear_part(k).unwrap();
            assert_eq!(lin, DiffPoly::psi(k as u32 + 1), "k = {k}");
        }
    }

    #[test]
    fn symbol_closed_form() {
        let spec = FlowSpec::new(vec![
            (1, Schedule::linear(0.5, 0.0)),
            (2, Schedule::sinusoid(1.0, 2.0, 0.1)),
            (5, Schedule::linear(-0.3, 1.0)),
        ])
        .unwrap();
        for &xi in &[-2.0, -0.5, 0.0, 0.7, 3.0] {
            for &t in &[0.0, 0.4] {
                let mu = linear_symbol(&spec, t, xi).unwrap();
                let ix = Complex64::new(0.0, xi);
                let expect: Complex64 = spec
                    .entries()
                    .iter()
                    .map(|(k, s)| i_pow(*k) * s.derivative(t) * ix.powu(*k as u32 + 1))
                    .sum();
                assert!((mu - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn odd_flows_with_real_rates_are_dispersive() {
        // Odd k: i^k (iξ)^{k+1} is purely imaginary, so |e^{μ dt}| = 1.
        for k in [1, 3, 5] {
            let spec = FlowSpec::single(k).unwrap();
            for xi in [-1.3, 0.4, 2.0] {
                assert!(linear_symbol(&spec, 0.0, xi).unwrap().re.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ifrk4_rejects_time_dependent_schedules() {
        let g = Grid::new(32, 10.0).unwrap();
        let spec = FlowSpec::new(vec![(1, Schedule::sinusoid(1.0, 1.0, 0.0))]).unwrap();
        assert!(matches!(
            Integrator::new(g, spec, Method::IfRk4),
            Err(EvolveError::NonConstantSchedule)
        ));
    }

    #[test]
    fn rk4_stability_guard() {
        let g = Grid::new(64, 10.0).unwrap();
        let spec = FlowSpec::single(1).unwrap();
        let it = Integrator::new(g, spec, Method::Rk4).unwrap();
        let f = Field::zeros(g, 0.0);
        let kmax = g.max_wavenumber();
        assert!(matches!(it.step(&f, 3.0 / (kmax * kmax)), Err(EvolveError::StabilityViolation { .. })));
        assert!(it.step(&f, 2.0 / (kmax * kmax)).is_ok());
    }

    #[test]
    fn plane_wave_phase_rotation() {
        // ψ = e^{iqx} rotates as e^{iθt} with θ = 2 − q².
        let g = Grid::new(32, 2.0 * std::f64::consts::PI).unwrap();
        let q = 2.0;
        let f0 = Field::from_fn(g, 0.0, |x| Complex64::new(0.0, q * x).exp()).unwrap();
        let spec = FlowSpec::single(1).unwrap();
        let theta = 2.0 - q * q;
        for m in [Method::Rk4, Method::IfRk4] {
            let it = Integrator::new(g, spec.clone(), m).unwrap();
            let traj = it.run(&f0, 0.5, 1e-3, &Observers::default()).unwrap();
            let last = &traj.snapshots.last().unwrap().field;
            assert_eq!(last.time(), 0.5);
            let exact = Field::from_fn(g, 0.5, |x| Complex64::new(0.0, q * x + theta * 0.5).exp()).unwrap();
            assert!(last.max_abs_diff(&exact) < 1e-9, "{m:?}: {}", last.max_abs_diff(&exact));
        }
    }

    #[test]
    fn soliton_conserves_invariants() {
        let g = Grid::new(256, 40.0).unwrap();
        let f0 = Field::from_fn(g, 0.0, |x| Complex64::new(sech(x), 0.0)).unwrap();
        let spec = FlowSpec::single(1).unwrap();
        let it = Integrator::new(g, spec, Method::IfRk4).unwrap();
        let traj = it.run(&f0, 1.0, 5e-3, &Observers::every(50)).unwrap();
        let first = traj.conserved.first().unwrap().values;
        let last = traj.conserved.last().unwrap().values;
        for i in 0..3 {
            assert!((first[i] - last[i]).norm() < 1e-8, "density {}", i + 1);
        }
        // |ψ| is stationary for the one-soliton.
        let fin = &traj.snapshots.last().unwrap().field;
        for (a, b) in fin.values().iter().zip(f0.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-8);
        }
    }

    #[test]
    fn observers_hit_exact_times() {
        let g = Grid::new(16, 10.0).unwrap();
        let f0 = Field::zeros(g, 0.0);
        let spec = FlowSpec::single(1).unwrap();
        let it = Integrator::new(g, spec, Method::IfRk4).unwrap();
        let traj = it.run(&f0, 1.0, 0.3, &Observers::at(&[0.25, 0.5])).unwrap();
        let times: Vec<f64> = traj.snapshots.iter().map(|s| s.field.time()).collect();
        assert_eq!(times, vec![0.0, 0.25, 0.5, 1.0]);
    }

    #[test]
    fn blowup_returns_last_good_state() {
        let g = Grid::new(16, 10.0).unwrap();
        let mut vals = vec![Complex64::new(0.0, 0.0); 16];
        vals[3] = Complex64::new(1e200, 0.0);
        let f0 = Field::new(g, vals, 0.0).unwrap();
        let spec = FlowSpec::mixed(&[(3, 1.0)]).unwrap();
        let it = Integrator::new(g, spec, Method::IfRk4).unwrap();
        match it.step(&f0, 0.01) {
            Err(EvolveError::Blowup { last_good, .. }) => assert_eq!(*last_good, f0),
            other => panic!("expected blowup, got {other:?}"),
        }
    }
}
