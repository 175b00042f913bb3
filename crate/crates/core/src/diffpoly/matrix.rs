use std::ops::{Add, Mul, Neg, Sub};

use super::DiffPoly;
use crate::rational::GaussianRational;

/// 2×2 matrix over [`DiffPoly`]. `entries[r][c]`, zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MatrixDP {
    pub entries: [[DiffPoly; 2]; 2],
}

impl MatrixDP {
    pub fn new(a: DiffPoly, b: DiffPoly, c: DiffPoly, d: DiffPoly) -> Self {
        Self {
            entries: [[a, b], [c, d]],
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn diag(a: DiffPoly, d: DiffPoly) -> Self {
        Self::new(a, DiffPoly::zero(), DiffPoly::zero(), d)
    }

    pub fn offdiag(b: DiffPoly, c: DiffPoly) -> Self {
        Self::new(DiffPoly::zero(), b, c, DiffPoly::zero())
    }

    /// J = diag(−i, i).
    pub fn j() -> Self {
        Self::diag(
            DiffPoly::constant(GaussianRational::imag(-1)),
            DiffPoly::constant(GaussianRational::imag(1)),
        )
    }

    /// U⁰ = (0, iψ; −iφ, 0).
    pub fn u0() -> Self {
        Self::offdiag(
            DiffPoly::psi(0).scale(&GaussianRational::imag(1)),
            DiffPoly::phi(0).scale(&GaussianRational::imag(-1)),
        )
    }

    pub fn get(&self, r: usize, c: usize) -> &DiffPoly {
        &self.entries[r][c]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(DiffPoly::is_zero)
    }

    pub fn diagonal_part(&self) -> MatrixDP {
        Self::diag(self.entries[0][0].clone(), self.entries[1][1].clone())
    }

    pub fn off_diagonal_part(&self) -> MatrixDP {
        Self::offdiag(self.entries[0][1].clone(), self.entries[1][0].clone())
    }

    pub fn map(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> MatrixDP {
        let e = &self.entries;
        Self::new(f(&e[0][0]), f(&e[0][1]), f(&e[1][0]), f(&e[1][1]))
    }

    pub fn dx(&self) -> MatrixDP {
        self.map(DiffPoly::dx)
    }

    pub fn scale(&self, c: &GaussianRational) -> MatrixDP {
        self.map(|p| p.scale(c))
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &MatrixDP) -> MatrixDP {
        &(self * other) - &(other * self)
    }
}

impl Add for &MatrixDP {
    type Output = MatrixDP;
    fn add(self, rhs: &MatrixDP) -> MatrixDP {
        let (a, b) = (&self.entries, &rhs.entries);
        MatrixDP::new(
            &a[0][0] + &b[0][0],
            &a[0][1] + &b[0][1],
            &a[1][0] + &b[1][0],
            &a[1][1] + &b[1][1],
        )
    }
}

impl Sub for &MatrixDP {
    type Output = MatrixDP;
    fn sub(self, rhs: &MatrixDP) -> MatrixDP {
        self + &(-rhs)
    }
}

impl Neg for &MatrixDP {
    type Output = MatrixDP;
    fn neg(self) -> MatrixDP {
        self.map(|p| -p)
    }
}

impl Mul for &MatrixDP {
    type Output = MatrixDP;
    fn mul(self, rhs: &MatrixDP) -> MatrixDP {
        let (a, b) = (&self.entries, &rhs.entries);
        let cell = |r: usize, c: usize| &(&a[r][0] * &b[0][c]) + &(&a[r][1] * &b[1][c]);
        MatrixDP::new(cell(0, 0), cell(0, 1), cell(1, 0), cell(1, 1))
    }
}

/// Polynomial in λ with [`MatrixDP`] coefficients, highest power first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaMatrixPoly {
    coeffs: Vec<MatrixDP>,
}

impl LambdaMatrixPoly {
    /// Strips leading zero coefficients; the zero polynomial keeps a single
    /// zero coefficient.
    pub fn new(mut coeffs: Vec<MatrixDP>) -> Self {
        while coeffs.len() > 1 && coeffs[0].is_zero() {
            coeffs.remove(0);
        }
        if coeffs.is_empty() {
            coeffs.push(MatrixDP::zero());
        }
        Self { coeffs }
    }

    pub fn constant(m: MatrixDP) -> Self {
        Self::new(vec![m])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &MatrixDP {
        &self.coeffs[0]
    }

    /// Highest power first.
    pub fn coeffs(&self) -> &[MatrixDP] {
        &self.coeffs
    }

    /// Coefficient of λ^p (zero beyond the degree).
    pub fn coeff(&self, p: usize) -> MatrixDP {
        if p > self.degree() {
            MatrixDP::zero()
        } else {
            self.coeffs[self.degree() - p].clone()
        }
    }

    fn from_low_first(mut low: Vec<MatrixDP>) -> Self {
        low.reverse();
        Self::new(low)
    }

    fn low_first(&self) -> Vec<MatrixDP> {
        self.coeffs.iter().rev().cloned().collect()
    }

    /// Multiplication by `c·λ`.
    pub fn shift_scale(&self, c: &GaussianRational) -> Self {
        let mut coeffs: Vec<MatrixDP> = self.coeffs.iter().map(|m| m.scale(c)).collect();
        coeffs.push(MatrixDP::zero());
        Self::new(coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (self.low_first(), other.low_first());
        let n = a.len().max(b.len());
        let zero = MatrixDP::zero();
        let out = (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero))
            .collect();
        Self::from_low_first(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.map(|m| -m))
    }

    pub fn map(&self, f: impl Fn(&MatrixDP) -> MatrixDP) -> Self {
        Self::new(self.coeffs.iter().map(f).collect())
    }

    pub fn dx(&self) -> Self {
        self.map(MatrixDP::dx)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        let (a, b) = (self.low_first(), other.low_first());
        let mut out = vec![MatrixDP::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (k, y) in b.iter().enumerate() {
                out[i + k] = &out[i + k] + &x.commutator(y);
            }
        }
        Self::from_low_first(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(MatrixDP::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{imag, DiffPoly};
    use super::*;

    #[test]
    fn self_commutator_vanishes() {
        let a = MatrixDP::new(DiffPoly::psi(0), DiffPoly::phi(1), DiffPoly::psi(2), imag(3));
        assert!(a.commutator(&a).is_zero());
    }

    #[test]
    fn commutator_with_j_on_offdiagonal() {
        let b = DiffPoly::psi(1);
        let c = DiffPoly::phi(2);
        let f = MatrixDP::offdiag(b.clone(), c.clone());
        let got = MatrixDP::j().commutator(&f);
        assert_eq!(got, MatrixDP::offdiag(imag(-2) * b, imag(2) * c));
    }

    #[test]
    fn diagonal_of_f1_commutator() {
        let f1 = MatrixDP::offdiag(-DiffPoly::psi(1), -DiffPoly::phi(1));
        let c = f1.commutator(&MatrixDP::u0());
        assert_eq!(
            c.get(0, 0),
            &(imag(1) * (DiffPoly::psi(1) * DiffPoly::phi(0) + DiffPoly::psi(0) * DiffPoly::phi(1)))
        );
        assert!(c.get(0, 1).is_zero() && c.get(1, 0).is_zero());
    }

    #[test]
    fn lambda_poly_degree_and_commutator() {
        let u = LambdaMatrixPoly::new(vec![MatrixDP::j(), MatrixDP::u0()]);
        assert_eq!(u.degree(), 1);
        assert!(u.commutator(&u).is_zero());
        let v = u.shift_scale(&GaussianRational::integer(2));
        assert_eq!(v.degree(), 2);
        assert_eq!(v.coeff(0), MatrixDP::zero());
        assert_eq!(v.leading(), &MatrixDP::j().scale(&GaussianRational::integer(2)));
    }
}
