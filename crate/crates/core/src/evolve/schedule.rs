use std::fmt;

use thiserror::Error;

use crate::hierarchy::STANDARD_ORDER;

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("flow order {0} appears more than once")]
    DuplicateFlow(usize),
    #[error("flow order {k} outside 1..={max}")]
    FlowOutOfRange { k: usize, max: usize },
    #[error("schedule parameters must be finite: {0}")]
    NonFinite(String),
    #[error("bump support [{start}, {end}] is empty")]
    EmptyBump { start: f64, end: f64 },
}

/// A time reparametrization `t_k = α(t)` for one hierarchy flow.
#[derive(Clone, Debug, PartialEq)]
pub enum Schedule {
    /// `α(t) = slope·t + offset`
    Linear { slope: f64, offset: f64 },
    /// `α(t) = Σ c_i t^i`
    Poly(Vec<f64>),
    /// `α(t) = A sin(ωt + θ₀)`
    Sinusoid { amplitude: f64, frequency: f64, phase: f64 },
    /// `α(t) = h·exp(4 − 1/(τ(1−τ)))` for `τ = (t−start)/(end−start) ∈ (0,1)`,
    /// zero elsewhere. Peaks at `h` in the middle of the support.
    Bump { start: f64, end: f64, height: f64 },
}

impl Schedule {
    pub fn linear(slope: f64, offset: f64) -> Self {
        Schedule::Linear { slope, offset }
    }

    pub fn sinusoid(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Schedule::Sinusoid {
            amplitude,
            frequency,
            phase,
        }
    }

    pub fn bump(start: f64, end: f64, height: f64) -> Self {
        Schedule::Bump { start, end, height }
    }

    pub fn validate(&self) -> Result<(), ScheduleError> {
        let params: Vec<f64> = match self {
            Schedule::Linear { slope, offset } => vec![*slope, *offset],
            Schedule::Poly(c) => c.clone(),
            Schedule::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => vec![*amplitude, *frequency, *phase],
            Schedule::Bump { start, end, height } => {
                if start.is_finite() && end.is_finite() && end <= start {
                    return Err(ScheduleError::EmptyBump {
                        start: *start,
                        end: *end,
                    });
                }
                vec![*start, *end, *height]
            }
        };
        if params.iter().all(|p| p.is_finite()) {
            Ok(())
        } else {
            Err(ScheduleError::NonFinite(self.to_string()))
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Schedule::Linear { .. })
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Schedule::Linear { slope, offset } => slope * t + offset,
            Schedule::Poly(c) => c.iter().rev().fold(0.0, |acc, ci| acc * t + ci),
            Schedule::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * t + phase).sin(),
            Schedule::Bump { start, end, height } => {
                let tau = (t - start) / (end - start);
                if tau <= 0.0 || tau >= 1.0 {
                    0.0
                } else {
                    height * (4.0 - 1.0 / (tau * (1.0 - tau))).exp()
                }
            }
        }
    }

    /// `α'(t)`, in closed form.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Schedule::Linear { slope, .. } => *slope,
            Schedule::Poly(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, ci)| acc * t + i as f64 * ci),
            Schedule::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => amplitude * frequency * (frequency * t + phase).cos(),
            Schedule::Bump { start, end, .. } => {
                let w = end - start;
                let tau = (t - start) / w;
                if tau <= 0.0 || tau >= 1.0 {
                    0.0
                } else {
                    let s = tau * (1.0 - tau);
                    self.value(t) * (1.0 - 2.0 * tau) / (s * s) / w
                }
            }
        }
    }

    /// The schedule run backwards in hierarchy time: `α ↦ −α`.
    pub fn negated(&self) -> Self {
        match self {
            Schedule::Linear { slope, offset } => Schedule::linear(-slope, -offset),
            Schedule::Poly(c) => Schedule::Poly(c.iter().map(|v| -v).collect()),
            Schedule::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => Schedule::sinusoid(-amplitude, *frequency, *phase),
            Schedule::Bump { start, end, height } => Schedule::bump(*start, *end, -height),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Linear { slope, offset } => write!(f, "linear({slope},{offset})"),
            Schedule::Poly(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "poly({})", parts.join(","))
            }
            Schedule::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => write!(f, "sin({amplitude},{frequency},{phase})"),
            Schedule::Bump { start, end, height } => write!(f, "bump({start},{end},{height})"),
        }
    }
}

/// Participating flows and their schedules: `ψ_t = Σ_k i^k α'_k(t) H_k(ψ)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FlowSpec {
    entries: Vec<(usize, Schedule)>,
    max_order: usize,
}

impl FlowSpec {
    /// Entries are sorted by flow order; the declared maximum order is the
    /// largest one present.
    pub fn new(entries: Vec<(usize, Schedule)>) -> Result<Self, ScheduleError> {
        let m = entries.iter().map(|(k, _)| *k).max().unwrap_or(0);
        Self::with_max_order(entries, m)
    }

    pub fn with_max_order(mut entries: Vec<(usize, Schedule)>, max_order: usize) -> Result<Self, ScheduleError> {
        let cap = max_order.min(STANDARD_ORDER);
        entries.sort_by_key(|(k, _)| *k);
        for (i, (k, s)) in entries.iter().enumerate() {
            if *k == 0 || *k > cap {
                return Err(ScheduleError::FlowOutOfRange { k: *k, max: cap });
            }
            if i > 0 && entries[i - 1].0 == *k {
                return Err(ScheduleError::DuplicateFlow(*k));
            }
            s.validate()?;
        }
        Ok(Self { entries, max_order })
    }

    /// Constant coefficients `b_k` (linear schedules through the origin).
    pub fn mixed(coeffs: &[(usize, f64)]) -> Result<Self, ScheduleError> {
        Self::new(coeffs.iter().map(|&(k, b)| (k, Schedule::linear(b, 0.0))).collect())
    }

    /// Pure flow `k` in its native time.
    pub fn single(k: usize) -> Result<Self, ScheduleError> {
        Self::mixed(&[(k, 1.0)])
    }

    pub fn entries(&self) -> &[(usize, Schedule)] {
        &self.entries
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All schedules linear, i.e. constant coefficients.
    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|(_, s)| s.is_linear())
    }

    pub fn negated(&self) -> Self {
        Self {
            entries: self.entries.iter().map(|(k, s)| (*k, s.negated())).collect(),
            max_order: self.max_order,
        }
    }

    /// Hierarchy times `(α_1(t), …, α_M(t))`, zero for absent flows.
    pub fn times_at(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.max_order];
        for (k, s) in &self.entries {
            out[k - 1] = s.value(t);
        }
        out
    }

    /// Rates `(α'_1(t), …, α'_M(t))`.
    pub fn rates_at(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.max_order];
        for (k, s) in &self.entries {
            out[k - 1] = s.derivative(t);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_kinds() -> Vec<Schedule> {
        vec![
            Schedule::linear(0.7, -0.2),
            Schedule::Poly(vec![0.1, -0.5, 0.25, 0.3]),
            Schedule::sinusoid(1.2, 0.8, 0.3),
            Schedule::bump(-0.5, 1.5, 0.8),
        ]
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-5;
        for s in all_kinds() {
            for _ in 0..200 {
                let t: f64 = rng.gen_range(-1.0..2.0);
                let fd = (s.value(t + h) - s.value(t - h)) / (2.0 * h);
                assert!((fd - s.derivative(t)).abs() < 1e-6, "{s} at {t}");
            }
        }
    }

    #[test]
    fn bump_vanishes_outside_support() {
        let s = Schedule::bump(1.0, 2.0, 3.0);
        for t in [-5.0, 0.0, 1.0, 2.0, 2.5, 100.0] {
            assert_eq!(s.value(t), 0.0);
            assert_eq!(s.derivative(t), 0.0);
        }
        assert!((s.value(1.5) - 3.0).abs() < 1e-15);
        assert!(s.derivative(1.5).abs() < 1e-12);
        assert!(s.derivative(1.2) > 0.0 && s.derivative(1.8) < 0.0);
    }

    #[test]
    fn spec_validation() {
        let lin = Schedule::linear(1.0, 0.0);
        assert_eq!(
            FlowSpec::new(vec![(1, lin.clone()), (1, lin.clone())]),
            Err(ScheduleError::DuplicateFlow(1))
        );
        assert!(matches!(FlowSpec::new(vec![(0, lin.clone())]), Err(ScheduleError::FlowOutOfRange { .. })));
        assert!(FlowSpec::with_max_order(vec![(3, lin.clone())], 2).is_err());
        assert!(FlowSpec::new(vec![(1, Schedule::bump(1.0, 1.0, 1.0))]).is_err());
        assert!(FlowSpec::new(vec![(1, Schedule::linear(f64::NAN, 0.0))]).is_err());
        let s = FlowSpec::new(vec![(3, lin.clone()), (1, Schedule::sinusoid(1.0, 1.0, 0.0))]).unwrap();
        assert_eq!(s.entries()[0].0, 1);
        assert!(!s.is_constant());
        assert_eq!(s.times_at(0.0).len(), 3);
    }

    #[test]
    fn negation_flips_values_and_rates() {
        for s in all_kinds() {
            let n = s.negated();
            for t in [-0.3, 0.4, 1.1] {
                assert_eq!(n.value(t), -s.value(t));
                assert_eq!(n.derivative(t), -s.derivative(t));
            }
        }
    }
}
