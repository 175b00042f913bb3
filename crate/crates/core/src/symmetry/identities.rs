//! Coefficient-level checks tying the moduli transform of finite-gap data
//! to the argument maps.
//!
//! Both sides of each identity are linear in `(x, t_1, …, t_M)`, so they are
//! compared coefficient by coefficient. Errors are relative to
//! `max(1, |coefficient|)`.

use num_complex::Complex64;

use super::{arguments, SymmetryError, SymmetryParams};
use crate::solutions::{moduli_transform, RiemannData, SolutionError};

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn check_depth(data: &RiemannData, m: usize) -> Result<(), SymmetryError> {
    if data.v.len() < m + 1 || data.k.len() < m + 2 {
        return Err(SolutionError::InvalidData(format!(
            "{m} flows need V^1..V^{} and K_0..K_{}",
            m + 1,
            m + 1
        ))
        .into());
    }
    super::check_len(m)
}

/// `(X, T)` images of the unit vectors `x, t_1, …, t_M`.
fn basis_images(p: &SymmetryParams, m: usize) -> Vec<(f64, Vec<f64>)> {
    (0..=m)
        .map(|i| {
            let x = if i == 0 { 1.0 } else { 0.0 };
            let mut t = vec![0.0; m];
            if i > 0 {
                t[i - 1] = 1.0;
            }
            arguments(p, x, &t)
        })
        .collect()
}

/// `Ṽ¹x + Σ Ṽ^{j+1}t_j` against `V¹X + Σ V^{j+1}T_j`.
pub fn argument_identity_error(data: &RiemannData, p: &SymmetryParams, m: usize) -> Result<f64, SymmetryError> {
    check_depth(data, m)?;
    let td = moduli_transform(data, p.a(), p.b())?;
    let mut worst = 0.0f64;
    for (i, (xx, tt)) in basis_images(p, m).iter().enumerate() {
        for c in 0..data.genus() {
            let lhs = td.v[i][c];
            let mut rhs = data.v[0][c] * xx;
            for (j, tj) in tt.iter().enumerate() {
                rhs += data.v[j + 1][c] * tj;
            }
            worst = worst.max(rel(lhs, rhs));
        }
    }
    Ok(worst)
}

/// `−K̃₁x − Σ K̃_{j+1}t_j` against `Φ(X, T) − bx − ½Σ (2b)^{m+1}t_m`.
pub fn phase_identity_error(data: &RiemannData, p: &SymmetryParams, m: usize) -> Result<f64, SymmetryError> {
    check_depth(data, m)?;
    let td = moduli_transform(data, p.a(), p.b())?;
    let tb = 2.0 * p.b();
    let mut worst = 0.0f64;
    for (i, (xx, tt)) in basis_images(p, m).iter().enumerate() {
        let lhs = -td.k[i + 1];
        let mut rhs = -data.k[1] * xx;
        for (j, tj) in tt.iter().enumerate() {
            rhs -= data.k[j + 2] * tj;
        }
        rhs -= if i == 0 { p.b() } else { 0.5 * tb.powi(i as i32 + 1) };
        worst = worst.max(rel(lhs, rhs));
    }
    Ok(worst)
}

/// At `a = 1`: `K̃_j` against the short form `K_j + 2^{j−1}b^j`, for
/// `j = 1..=m+1`.
pub fn k_reduction_error(data: &RiemannData, b: f64, m: usize) -> Result<f64, SymmetryError> {
    check_depth(data, m)?;
    let td = moduli_transform(data, 1.0, b)?;
    let mut worst = 0.0f64;
    for j in 1..=m + 1 {
        let short = data.k[j] + 2f64.powi(j as i32 - 1) * b.powi(j as i32);
        worst = worst.max(rel(td.k[j], short));
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityReport {
    pub argument: f64,
    pub phase: f64,
    pub k_reduction: f64,
}

impl IdentityReport {
    pub fn compute(data: &RiemannData, p: &SymmetryParams, m: usize) -> Result<Self, SymmetryError> {
        Ok(Self {
            argument: argument_identity_error(data, p, m)?,
            phase: phase_identity_error(data, p, m)?,
            k_reduction: k_reduction_error(data, p.b(), m)?,
        })
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.argument < tol && self.phase < tol && self.k_reduction < tol
    }
}
