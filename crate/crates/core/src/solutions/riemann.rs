//! Finite-gap data and the theta-function formula
//!
//! ```text
//! ψ = (2K₀/ρ) · Θ(Z)Θ(U+Z−Δ) / (Θ(Z−Δ)Θ(U+Z)) · exp{2iΦ}
//! U = V¹x + Σ_j V^{j+1} t_j,   Φ = −K₁x − Σ_j K_{j+1} t_j
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::theta::{RiemannMatrix, ThetaEvaluator, DEFAULT_THETA_TOL};
use super::{Sampler, SolutionError};

/// A denominator theta is treated as zero below this fraction of its scale.
const ZERO_THETA: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct RiemannData {
    pub b: RiemannMatrix,
    /// `V¹, V², …`
    pub v: Vec<Vec<Complex64>>,
    /// `K₀, K₁, …`
    pub k: Vec<Complex64>,
    pub z: Vec<Complex64>,
    pub delta: Vec<Complex64>,
    pub rho: Complex64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RiemannJson {
    genus: usize,
    #[serde(rename = "B")]
    b: Vec<[f64; 2]>,
    #[serde(rename = "V")]
    v: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "K")]
    k: Vec<[f64; 2]>,
    #[serde(rename = "Z")]
    z: Vec<[f64; 2]>,
    #[serde(rename = "Delta")]
    delta: Vec<[f64; 2]>,
    rho: [f64; 2],
}

fn to_c(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn to_pair(c: &Complex64) -> [f64; 2] {
    [c.re, c.im]
}

impl RiemannData {
    pub fn new(
        b: RiemannMatrix,
        v: Vec<Vec<Complex64>>,
        k: Vec<Complex64>,
        z: Vec<Complex64>,
        delta: Vec<Complex64>,
        rho: Complex64,
    ) -> Result<Self, SolutionError> {
        let g = b.genus();
        let bad = |what: String| Err(SolutionError::InvalidData(what));
        if v.is_empty() {
            return bad("at least one period vector is needed".into());
        }
        if let Some(i) = v.iter().position(|vi| vi.len() != g) {
            return bad(format!("V^{} has length {} for genus {g}", i + 1, v[i].len()));
        }
        if k.len() < 2 {
            return bad("need at least K0 and K1".into());
        }
        if k[0].norm() == 0.0 {
            return bad("K0 must be nonzero".into());
        }
        if rho.norm() == 0.0 {
            return bad("rho must be nonzero".into());
        }
        if z.len() != g || delta.len() != g {
            return bad(format!("Z and Delta must have length {g}"));
        }
        let finite = v.iter().flatten().chain(&k).chain(&z).chain(&delta).chain([&rho]);
        if finite.into_iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return bad("non-finite entry".into());
        }
        Ok(Self { b, v, k, z, delta, rho })
    }

    pub fn genus(&self) -> usize {
        self.b.genus()
    }

    /// Highest flow time covered by both the period vectors and the constants.
    pub fn max_flow(&self) -> usize {
        (self.v.len() - 1).min(self.k.len() - 2)
    }

    pub fn to_json(&self) -> String {
        let g = self.genus();
        let m = self.b.matrix();
        let j = RiemannJson {
            genus: g,
            b: (0..g * g).map(|i| to_pair(&m[(i / g, i % g)])).collect(),
            v: self.v.iter().map(|vi| vi.iter().map(to_pair).collect()).collect(),
            k: self.k.iter().map(to_pair).collect(),
            z: self.z.iter().map(to_pair).collect(),
            delta: self.delta.iter().map(to_pair).collect(),
            rho: to_pair(&self.rho),
        };
        serde_json::to_string_pretty(&j).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SolutionError> {
        let j: RiemannJson = serde_json::from_str(text)?;
        let g = j.genus;
        if g == 0 {
            return Err(SolutionError::InvalidData("genus must be at least 1".into()));
        }
        let entries: Vec<Complex64> = j.b.iter().map(to_c).collect();
        let b = RiemannMatrix::from_rows(g, &entries)?;
        let vecs = |xs: &[[f64; 2]]| xs.iter().map(to_c).collect::<Vec<_>>();
        Self::new(
            b,
            j.v.iter().map(|vi| vecs(vi)).collect(),
            vecs(&j.k),
            vecs(&j.z),
            vecs(&j.delta),
            to_c(&j.rho),
        )
    }

    pub fn read_file(path: &Path) -> Result<Self, SolutionError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &Path) -> Result<(), SolutionError> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    fn check_times(&self, times: &[f64]) -> Result<(), SolutionError> {
        if times.len() > self.max_flow() {
            return Err(SolutionError::TooManyTimes {
                got: times.len(),
                order: self.max_flow(),
            });
        }
        Ok(())
    }

    /// `U(x, t)`.
    pub fn argument(&self, x: f64, times: &[f64]) -> Vec<Complex64> {
        let mut u: Vec<Complex64> = self.v[0].iter().map(|v| v * x).collect();
        for (j, t) in times.iter().enumerate() {
            for (ui, vi) in u.iter_mut().zip(&self.v[j + 1]) {
                *ui += vi * t;
            }
        }
        u
    }

    /// `Φ(x, t)`.
    pub fn phase(&self, x: f64, times: &[f64]) -> Complex64 {
        let mut p = -self.k[1] * x;
        for (j, t) in times.iter().enumerate() {
            p -= self.k[j + 2] * t;
        }
        p
    }
}

fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sample_with(ev: &ThetaEvaluator, data: &RiemannData, x: f64, times: &[f64]) -> Result<Complex64, SolutionError> {
    data.check_times(times)?;
    let u = data.argument(x, times);
    let z = &data.z;
    let zd = sub(z, &data.delta);
    let uz = add(&u, z);
    let uzd = sub(&uz, &data.delta);
    let t_z = ev.eval_scaled(z)?;
    let t_uzd = ev.eval_scaled(&uzd)?;
    let t_zd = ev.eval_scaled(&zd)?;
    let t_uz = ev.eval_scaled(&uz)?;
    if t_zd.mantissa.norm() < ZERO_THETA || t_uz.mantissa.norm() < ZERO_THETA {
        return Err(SolutionError::ThetaZeroDivision { x });
    }
    let num = t_z.mantissa * t_uzd.mantissa;
    let den = t_zd.mantissa * t_uz.mantissa;
    let log = (t_z.log_scale - t_uz.log_scale) + (t_uzd.log_scale - t_zd.log_scale);
    let prefactor = 2.0 * data.k[0] / data.rho;
    let ratio = num / den;
    let ratio = if log == 0.0 { ratio } else { ratio * log.exp() };
    let phase = (Complex64::new(0.0, 2.0) * data.phase(x, times)).exp();
    Ok(prefactor * ratio * phase)
}

/// The theta-function formula at one point.
pub fn finite_gap_sample(data: &RiemannData, x: f64, times: &[f64]) -> Result<Complex64, SolutionError> {
    let ev = ThetaEvaluator::new(data.b.clone(), DEFAULT_THETA_TOL)?;
    sample_with(&ev, data, x, times)
}

/// Pushes the data forward along `λ ↦ aλ + b`.
pub fn moduli_transform(data: &RiemannData, a: f64, b: f64) -> Result<RiemannData, SolutionError> {
    if a == 0.0 || !a.is_finite() || !b.is_finite() {
        return Err(SolutionError::BadParameter(format!("(a, b) = ({a}, {b})")));
    }
    let g = data.genus();
    let binom = |n: usize, k: usize| -> f64 { (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) };
    let v: Vec<Vec<Complex64>> = (1..=data.v.len())
        .map(|j| {
            let mut out: Vec<Complex64> = data.v[j - 1].iter().map(|c| c * a.powi(j as i32)).collect();
            for m in 1..j {
                let w = 2f64.powi(m as i32) * binom(j, m) * a.powi((j - m) as i32) * b.powi(m as i32);
                for i in 0..g {
                    out[i] += data.v[j - m - 1][i] * w;
                }
            }
            out
        })
        .collect();
    let mut k = vec![data.k[0] * a];
    for j in 1..data.k.len() {
        let mut kj = Complex64::new(2f64.powi(j as i32 - 1) * b.powi(j as i32), 0.0);
        for m in 1..=j {
            let w = 2f64.powi((j - m) as i32) * binom(j, m) * a.powi(m as i32) * b.powi((j - m) as i32);
            kj += data.k[m] * w;
        }
        k.push(kj);
    }
    RiemannData::new(data.b.clone(), v, k, data.z.clone(), data.delta.clone(), data.rho)
}

/// Sampler over finite-gap data. Points where a denominator theta vanishes
/// evaluate to NaN; use [`finite_gap_sample`] to get the error instead.
#[derive(Clone, Debug)]
pub struct FiniteGap {
    data: RiemannData,
    ev: ThetaEvaluator,
}

impl FiniteGap {
    pub fn new(data: RiemannData) -> Result<Self, SolutionError> {
        let ev = ThetaEvaluator::new(data.b.clone(), DEFAULT_THETA_TOL)?;
        Ok(Self { data, ev })
    }

    pub fn data(&self) -> &RiemannData {
        &self.data
    }

    pub fn try_eval(&self, x: f64, times: &[f64]) -> Result<Complex64, SolutionError> {
        sample_with(&self.ev, &self.data, x, times)
    }
}

impl Sampler for FiniteGap {
    fn name(&self) -> String {
        format!("finitegap(g={})", self.data.genus())
    }

    fn order(&self) -> usize {
        self.data.max_flow()
    }

    fn eval(&self, x: f64, times: &[f64]) -> Complex64 {
        self.try_eval(x, times).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_data() -> RiemannData {
        let b = RiemannMatrix::from_rows(2, &[c(0.2, 1.1), c(0.1, 0.3), c(0.1, 0.3), c(-0.4, 0.9)]).unwrap();
        RiemannData::new(
            b,
            vec![vec![c(0.3, 0.0), c(-0.2, 0.0)], vec![c(0.1, 0.0), c(0.4, 0.0)], vec![c(-0.3, 0.0), c(0.2, 0.0)]],
            vec![c(0.8, 0.1), c(0.2, 0.0), c(-0.3, 0.0), c(0.5, 0.0)],
            vec![c(0.1, 0.05), c(-0.2, 0.1)],
            vec![c(0.25, 0.3), c(0.1, -0.2)],
            c(1.5, 0.5),
        )
        .unwrap()
    }

    #[test]
    fn origin_gives_prefactor_exactly() {
        let d = sample_data();
        let v = finite_gap_sample(&d, 0.0, &[0.0, 0.0]).unwrap();
        assert_eq!(v, 2.0 * d.k[0] / d.rho);
    }

    #[test]
    fn zero_periods_only_rotate() {
        let mut d = sample_data();
        for vi in d.v.iter_mut() {
            vi.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        }
        let m0 = finite_gap_sample(&d, 0.0, &[]).unwrap().norm();
        for (x, t) in [(1.0, 0.3), (-2.0, 1.1), (0.5, -0.7)] {
            let m = finite_gap_sample(&d, x, &[t, 0.2]).unwrap().norm();
            assert!((m - m0).abs() < 1e-12 * m0);
        }
    }

    #[test]
    fn json_round_trip() {
        let d = sample_data();
        let back = RiemannData::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert!(RiemannData::from_json(&d.to_json().replacen("\"rho\"", "\"rh0\"", 1)).is_err());
    }

    #[test]
    fn transform_identity_and_first_orders() {
        let d = sample_data();
        assert_eq!(moduli_transform(&d, 1.0, 0.0).unwrap(), d);
        let (a, b) = (1.7, -0.3);
        let t = moduli_transform(&d, a, b).unwrap();
        assert!((t.k[0] - a * d.k[0]).norm() < 1e-15);
        assert!((t.k[1] - (a * d.k[1] + b)).norm() < 1e-15);
        for i in 0..2 {
            assert!((t.v[0][i] - a * d.v[0][i]).norm() < 1e-15);
            let v2 = a * a * d.v[1][i] + 4.0 * a * b * d.v[0][i];
            assert!((t.v[1][i] - v2).norm() < 1e-14);
        }
    }

    #[test]
    fn too_many_times() {
        let d = sample_data();
        assert_eq!(d.max_flow(), 2);
        assert!(matches!(
            finite_gap_sample(&d, 0.0, &[0.0, 0.0, 0.0]),
            Err(SolutionError::TooManyTimes { .. })
        ));
    }
}
