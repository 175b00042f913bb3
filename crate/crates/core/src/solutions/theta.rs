//! Riemann theta function `Θ(z|B) = Σ_{n∈ℤ^g} exp{2πi(½nᵀBn + nᵀz)}`.
//!
//! With `Y = Im B` and `y = Im z` every term has modulus
//! `S·exp(−π(n+c)ᵀY(n+c))`, where `c = Y⁻¹y` and `S = exp(π yᵀY⁻¹y)`. The sum
//! is taken over the lattice ellipsoid `(n+c)ᵀY(n+c) ≤ R²`, enumerated
//! coordinate by coordinate through the Cholesky factor of `Y`; `R` is the
//! smallest radius whose tail bound drops below the tolerance. Values are
//! accurate to `tol·S`.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;

use super::SolutionError;

pub const DEFAULT_THETA_TOL: f64 = 1e-15;

/// Symmetric `g×g` complex matrix with positive definite imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannMatrix {
    b: DMatrix<Complex64>,
    /// Upper-triangular `T` with `Y = TᵀT`.
    t: DMatrix<f64>,
    y_inv: DMatrix<f64>,
    lambda_min: f64,
}

impl RiemannMatrix {
    pub fn new(b: DMatrix<Complex64>) -> Result<Self, SolutionError> {
        let g = b.nrows();
        if g == 0 || b.ncols() != g {
            return Err(SolutionError::InvalidData(format!("Riemann matrix is {}x{}", b.nrows(), b.ncols())));
        }
        if b.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SolutionError::InvalidData("non-finite Riemann matrix entry".into()));
        }
        let asym = (&b - b.transpose()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if asym > 1e-12 {
            return Err(SolutionError::NotSymmetric(asym));
        }
        let y = b.map(|v| v.im);
        let y = (&y + y.transpose()) * 0.5;
        let lambda_min = SymmetricEigen::new(y.clone()).eigenvalues.min();
        if !(lambda_min > 0.0) {
            return Err(SolutionError::NotPositiveDefinite);
        }
        let chol: Cholesky<f64, Dyn> = Cholesky::new(y).ok_or(SolutionError::NotPositiveDefinite)?;
        let t = chol.l().transpose();
        let y_inv = chol.inverse();
        Ok(Self { b, t, y_inv, lambda_min })
    }

    /// Row-major entries.
    pub fn from_rows(g: usize, entries: &[Complex64]) -> Result<Self, SolutionError> {
        if entries.len() != g * g {
            return Err(SolutionError::InvalidData(format!("{} entries for genus {g}", entries.len())));
        }
        Self::new(DMatrix::from_row_slice(g, g, entries))
    }

    pub fn genus(&self) -> usize {
        self.b.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.b
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    /// Bound on `Σ_{‖y_n‖>R} exp(−π‖y_n‖²)` over the shifted lattice
    /// `y_n = T(n+c)`. Distinct points are at least `√λ_min` apart, so balls
    /// of radius `h = √λ_min/2` around them are disjoint, giving
    /// `g·h^{−g} ∫_{R−h}^∞ exp(−π(r−h)²) r^{g−1} dr`.
    pub fn tail_bound(&self, radius: f64) -> f64 {
        let g = self.genus() as i32;
        let h = 0.5 * self.lambda_min.sqrt();
        let lo = radius - h;
        if lo <= h {
            return f64::INFINITY;
        }
        // Simpson on [lo, lo + 12]; the integrand beyond is below e^{-450}.
        let steps = 2000;
        let w = 12.0 / steps as f64;
        let f = |r: f64| (-PI * (r - h) * (r - h)).exp() * r.powi(g - 1);
        let mut acc = f(lo) + f(lo + 12.0);
        for i in 1..steps {
            let r = lo + i as f64 * w;
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(r);
        }
        g as f64 / h.powi(g) * acc * w / 3.0
    }

    /// Smallest radius on a 1/16 grid whose tail bound is below `tol`.
    pub fn radius(&self, tol: f64) -> f64 {
        let h = 0.5 * self.lambda_min.sqrt();
        let mut r = 2.0 * h + 1.0 / 16.0;
        while self.tail_bound(r) >= tol {
            r += 1.0 / 16.0;
        }
        r
    }
}

/// `Θ = mantissa · exp(log_scale)`, with `|mantissa| ≲ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaValue {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ThetaValue {
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }
}

/// Theta evaluation for one matrix at a fixed tolerance.
#[derive(Clone, Debug)]
pub struct ThetaEvaluator {
    matrix: RiemannMatrix,
    tol: f64,
    radius: f64,
}

impl ThetaEvaluator {
    pub fn new(matrix: RiemannMatrix, tol: f64) -> Result<Self, SolutionError> {
        if !(tol > 0.0 && tol <= 1e-6) {
            return Err(SolutionError::BadTolerance(tol));
        }
        let radius = matrix.radius(tol);
        Ok(Self { matrix, tol, radius })
    }

    pub fn matrix(&self) -> &RiemannMatrix {
        &self.matrix
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn eval_scaled(&self, z: &[Complex64]) -> Result<ThetaValue, SolutionError> {
        let g = self.matrix.genus();
        if z.len() != g {
            return Err(SolutionError::InvalidData(format!("argument of length {} for genus {g}", z.len())));
        }
        let y = DVector::from_iterator(g, z.iter().map(|v| v.im));
        let c = &self.matrix.y_inv * &y;
        let log_scale = PI * y.dot(&c);
        let mut n = vec![0i64; g];
        let mut acc = Complex64::new(0.0, 0.0);
        self.enumerate(g, 0.0, &c, &mut n, &mut |n| {
            acc += self.term(n, z, log_scale);
        });
        Ok(ThetaValue {
            mantissa: acc,
            log_scale,
        })
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64, SolutionError> {
        Ok(self.eval_scaled(z)?.value())
    }

    fn term(&self, n: &[i64], z: &[Complex64], log_scale: f64) -> Complex64 {
        let b = &self.matrix.b;
        let g = n.len();
        let mut quad = Complex64::new(0.0, 0.0);
        for i in 0..g {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..g {
                row += b[(i, j)] * n[j] as f64;
            }
            quad += row * n[i] as f64;
        }
        let lin: Complex64 = n.iter().zip(z).map(|(&ni, zi)| zi * ni as f64).sum();
        let e = Complex64::new(0.0, 2.0 * PI) * (0.5 * quad + lin) - log_scale;
        e.exp()
    }

    /// Visits integer `n` with `‖T(n+c)‖ ≤ R`, fixing coordinates from the
    /// last down. `level` counts the coordinates still free.
    fn enumerate(&self, level: usize, used: f64, c: &DVector<f64>, n: &mut [i64], visit: &mut dyn FnMut(&[i64])) {
        if level == 0 {
            visit(n);
            return;
        }
        let i = level - 1;
        let t = &self.matrix.t;
        let g = n.len();
        let s: f64 = (i + 1..g).map(|j| t[(i, j)] * (n[j] as f64 + c[j])).sum();
        let room = self.radius * self.radius - used;
        if room < 0.0 {
            return;
        }
        let r = room.sqrt();
        let tii = t[(i, i)];
        let lo = (-c[i] - (s + r) / tii).ceil() as i64;
        let hi = (-c[i] + (r - s) / tii).floor() as i64;
        for ni in lo..=hi {
            n[i] = ni;
            let comp = tii * (ni as f64 + c[i]) + s;
            self.enumerate(level - 1, used + comp * comp, c, n, visit);
        }
        n[i] = 0;
    }
}

/// One-shot `Θ(z|B)` to tolerance `tol` relative to the scale `S`.
pub fn theta(z: &[Complex64], b: &RiemannMatrix, tol: f64) -> Result<Complex64, SolutionError> {
    ThetaEvaluator::new(b.clone(), tol)?.eval(z)
}
