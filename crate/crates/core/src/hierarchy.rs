//! Zero-curvature recursion for the AKNS hierarchy.
//!
//! With `U = λJ + U⁰` and `V_{k+1} = 2λV_k + V⁰_{k+1}`, compatibility of
//! `Ψ_x = UΨ`, `Ψ_{t_k} = V_kΨ` splits `V⁰_k = F_k + D_k` into an
//! off-diagonal part solved algebraically from
//! `[J, F_{k+1}] = 2(F_k)_x + 2[D_k, U⁰]` and a diagonal part obtained by
//! integrating `(D_k)_x = −diag[F_k, U⁰]`.
//!
//! Scalar flows use the convention `ψ_{t_k} = i^k H_k(ψ)` on the reduction
//! `φ = −ψ̄`, which makes every `H_k` real.

use std::sync::OnceLock;

use num_traits::Zero;
use thiserror::Error;

use crate::diffpoly::{DiffPoly, DiffPolyError, LambdaMatrixPoly, MatrixDP};
use crate::rational::GaussianRational;

/// Order of the process-wide table returned by [`standard_table`].
pub const STANDARD_ORDER: usize = 6;

#[derive(Debug, Error)]
pub enum HierarchyError {
    #[error("max order must be at least 1")]
    ZeroOrder,
    #[error("density of order {order} is not a total derivative: {source}")]
    RecursionBroken { order: usize, source: DiffPolyError },
    #[error("H_{order} has a non-real coefficient")]
    NonRealCoefficients { order: usize },
    #[error("order {k} outside the table range 1..={max}")]
    OrderOutOfRange { k: usize, max: usize },
}

/// Products of the recursion through a fixed order `K`.
#[derive(Clone, Debug)]
pub struct FlowTable {
    max_order: usize,
    /// `F_1 ..= F_{K+1}`
    off_diag: Vec<MatrixDP>,
    /// `D_1 ..= D_{K+1}`
    diag: Vec<MatrixDP>,
    /// `H_1 ..= H_K`
    scalar: Vec<DiffPoly>,
}

/// Solves `[J, F] = M` for off-diagonal `F`: entry (1,2) divides by `−2i`,
/// entry (2,1) by `2i`.
fn solve_offdiag(m: &MatrixDP) -> MatrixDP {
    let up = GaussianRational::imag(-2).inv().expect("nonzero");
    let lo = GaussianRational::imag(2).inv().expect("nonzero");
    MatrixDP::offdiag(m.get(0, 1).scale(&up), m.get(1, 0).scale(&lo))
}

fn diagonal_for(order: usize, f: &MatrixDP, u0: &MatrixDP) -> Result<MatrixDP, HierarchyError> {
    let c = f.commutator(u0);
    let integrate = |p: &DiffPoly| {
        (-p).antidx()
            .map_err(|source| HierarchyError::RecursionBroken { order, source })
    };
    Ok(MatrixDP::diag(integrate(c.get(0, 0))?, integrate(c.get(1, 1))?))
}

/// Runs the recursion through order `k_max`.
pub fn build_flows(k_max: usize) -> Result<FlowTable, HierarchyError> {
    if k_max == 0 {
        return Err(HierarchyError::ZeroOrder);
    }
    let u0 = MatrixDP::u0();
    let j = MatrixDP::j();
    let two = GaussianRational::integer(2);

    let mut off_diag = Vec::with_capacity(k_max + 1);
    let mut diag = Vec::with_capacity(k_max + 1);

    let f1 = solve_offdiag(&u0.dx().scale(&two));
    debug_assert_eq!(j.commutator(&f1), u0.dx().scale(&two));
    diag.push(diagonal_for(1, &f1, &u0)?);
    off_diag.push(f1);

    for k in 1..=k_max {
        let (f, d) = (&off_diag[k - 1], &diag[k - 1]);
        let rhs = &f.dx().scale(&two) + &d.commutator(&u0).scale(&two);
        let next = solve_offdiag(&rhs);
        diag.push(diagonal_for(k + 1, &next, &u0)?);
        off_diag.push(next);
    }

    let mut table = FlowTable {
        max_order: k_max,
        off_diag,
        diag,
        scalar: Vec::with_capacity(k_max),
    };
    for k in 1..=k_max {
        let (psi_t, _) = table.flow_rhs(k)?;
        let reduced = psi_t.reduce().expect("flow contains no conjugate jets");
        let h = reduced.scale(&GaussianRational::i_pow(-(k as i64)));
        if !h.coefficients_real() {
            return Err(HierarchyError::NonRealCoefficients { order: k });
        }
        table.scalar.push(h);
    }
    Ok(table)
}

/// Shared table of order [`STANDARD_ORDER`], built on first use.
pub fn standard_table() -> &'static FlowTable {
    static TABLE: OnceLock<FlowTable> = OnceLock::new();
    TABLE.get_or_init(|| build_flows(STANDARD_ORDER).expect("recursion is exact"))
}

impl FlowTable {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn check(&self, k: usize, max: usize) -> Result<(), HierarchyError> {
        if k == 0 || k > max {
            Err(HierarchyError::OrderOutOfRange { k, max })
        } else {
            Ok(())
        }
    }

    /// `F_k`, available for `1 ≤ k ≤ K+1`.
    pub fn off_diagonal(&self, k: usize) -> Result<&MatrixDP, HierarchyError> {
        self.check(k, self.max_order + 1)?;
        Ok(&self.off_diag[k - 1])
    }

    /// `D_k`, available for `1 ≤ k ≤ K+1`.
    pub fn diagonal(&self, k: usize) -> Result<&MatrixDP, HierarchyError> {
        self.check(k, self.max_order + 1)?;
        Ok(&self.diag[k - 1])
    }

    /// `V⁰_k = F_k + D_k`.
    pub fn v0(&self, k: usize) -> Result<MatrixDP, HierarchyError> {
        Ok(self.off_diagonal(k)? + self.diagonal(k)?)
    }

    /// Unreduced `(ψ_{t_k}, φ_{t_k}) = (−(F_{k+1})₁₂, −(F_{k+1})₂₁)`.
    pub fn flow_rhs(&self, k: usize) -> Result<(DiffPoly, DiffPoly), HierarchyError> {
        self.check(k, self.max_order)?;
        let f = &self.off_diag[k];
        Ok((-f.get(0, 1), -f.get(1, 0)))
    }

    /// `H_k` in the reduced jets ψ, ψ̄.
    pub fn scalar_h(&self, k: usize) -> Result<&DiffPoly, HierarchyError> {
        self.check(k, self.max_order)?;
        Ok(&self.scalar[k - 1])
    }

    /// Reduced `(D_k)₁₁`, for `1 ≤ k ≤ K+1`.
    pub fn conserved_density(&self, k: usize) -> Result<DiffPoly, HierarchyError> {
        Ok(self
            .diagonal(k)?
            .get(0, 0)
            .reduce()
            .expect("diagonal contains no conjugate jets"))
    }

    /// `V_k` as a polynomial of degree `k+1` in λ.
    pub fn assemble_v(&self, k: usize) -> Result<LambdaMatrixPoly, HierarchyError> {
        self.check(k, self.max_order)?;
        let two = GaussianRational::integer(2);
        let u = LambdaMatrixPoly::new(vec![MatrixDP::j(), MatrixDP::u0()]);
        let mut v = u.shift_scale(&two).add(&LambdaMatrixPoly::constant(self.v0(1)?));
        for m in 2..=k {
            v = v.shift_scale(&two).add(&LambdaMatrixPoly::constant(self.v0(m)?));
        }
        Ok(v)
    }
}

/// Per-power outcome of the compatibility audit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerCheck {
    pub power: usize,
    pub vanishes: bool,
    /// Number of nonzero terms across the four entries.
    pub residual_terms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroCurvatureReport {
    pub order: usize,
    pub powers: Vec<PowerCheck>,
}

impl ZeroCurvatureReport {
    pub fn passed(&self) -> bool {
        self.powers.iter().all(|p| p.vanishes)
    }
}

/// `U_t − ∂_x V_k + [U, V_k]` with the supplied `(ψ_t, φ_t)`.
pub fn zero_curvature_residual(
    table: &FlowTable,
    k: usize,
    psi_t: &DiffPoly,
    phi_t: &DiffPoly,
) -> Result<LambdaMatrixPoly, HierarchyError> {
    let v = table.assemble_v(k)?;
    let u = LambdaMatrixPoly::new(vec![MatrixDP::j(), MatrixDP::u0()]);
    let u_t = MatrixDP::offdiag(
        psi_t.scale(&GaussianRational::imag(1)),
        phi_t.scale(&GaussianRational::imag(-1)),
    );
    Ok(LambdaMatrixPoly::constant(u_t)
        .sub(&v.dx())
        .add(&u.commutator(&v)))
}

fn report_for(order: usize, r: &LambdaMatrixPoly, degree: usize) -> ZeroCurvatureReport {
    let powers = (0..=degree)
        .rev()
        .map(|p| {
            let c = r.coeff(p);
            let residual_terms = c.entries.iter().flatten().map(DiffPoly::len).sum();
            PowerCheck {
                power: p,
                vanishes: residual_terms == 0,
                residual_terms,
            }
        })
        .collect();
    ZeroCurvatureReport { order, powers }
}

/// Exact audit of the compatibility condition for flow `k`.
pub fn zero_curvature_check(table: &FlowTable, k: usize) -> Result<ZeroCurvatureReport, HierarchyError> {
    let (psi_t, phi_t) = table.flow_rhs(k)?;
    zero_curvature_check_with(table, k, &psi_t, &phi_t)
}

/// Audit with caller-supplied flow right-hand sides.
pub fn zero_curvature_check_with(
    table: &FlowTable,
    k: usize,
    psi_t: &DiffPoly,
    phi_t: &DiffPoly,
) -> Result<ZeroCurvatureReport, HierarchyError> {
    let r = zero_curvature_residual(table, k, psi_t, phi_t)?;
    // [U, V_k] has degree k+2 formally; report every power down to λ⁰
    Ok(report_for(k, &r, k + 2))
}

/// `true` when `p` has no constant term and every term obeys the flow's
/// parity structure: odd `k` have odd degree and even total derivative count,
/// even `k` odd degree and odd derivative count.
pub fn has_flow_parity(p: &DiffPoly, k: usize) -> bool {
    p.constant_term().is_zero()
        && p.terms().iter().all(|m| {
            let derivs: u32 = m.factors.as_slice().iter().map(|(j, e)| j.order * e).sum();
            m.degree() % 2 == 1 && (derivs as usize + k) % 2 == 1
        })
}
