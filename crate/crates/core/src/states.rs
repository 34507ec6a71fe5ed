//! Initial states whose reduced qubit dynamics conserve the observable.
//!
//! With `X` a Riccati solution and `|λ±⟩` the observable eigenvectors,
//! `Ψ = |λ₊⟩⊗ψ + |λ₋⟩⊗Xψ` evolves inside the graph of `X` and
//! `Φ = |λ₋⟩⊗φ − |λ₊⟩⊗X†φ` inside its orthogonal complement.

use alloc::vec::Vec;

use nalgebra::SVD;

use crate::blockform::ObservableDiag;
use crate::linalg::{ensure_square, re, vec_norm};
use crate::operators::{tensor_vec, FockSpace};
use crate::riccati::RiccatiSolution;
use crate::{CMatrix, CVector, Error, Result};

/// Default cutoff on the second Schmidt coefficient.
pub const SEPARABILITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    /// Graph branch, evolving under `K₊`.
    Psi,
    /// Orthogonal branch, evolving under `K₋`.
    Phi,
    /// Rabi parity-projected state with `ε = ±1`.
    RabiParity(i8),
    /// Plain product state, no conservation guarantee.
    Product,
}

/// The branch a dephasing state evolves in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Psi,
    Phi,
}

#[derive(Clone, Debug)]
pub struct DephasingState {
    /// Unit-norm vector on qubit ⊗ environment (qubit index outer).
    pub vec: CVector,
    pub kind: StateKind,
    /// Environment seed as supplied.
    pub seed: CVector,
    /// Seed rescaled so that the defining formula reproduces `vec` with no
    /// further normalization; `α(0) = ‖seed_normalized‖²` on the Ψ branch.
    pub seed_normalized: CVector,
    branch: Option<(Branch, CVector)>,
}

impl DephasingState {
    /// Branch and branch seed for the factorized propagator, if the state
    /// lies in one branch. Rabi parity states refer to the σx frame.
    pub fn branch(&self) -> Option<(Branch, CVector)> {
        self.branch.clone()
    }

    pub fn schmidt(&self, space: FockSpace) -> Result<Schmidt> {
        schmidt_analysis(&self.vec, space, SEPARABILITY_TOL)
    }
}

fn check_env(v: &CVector, dim: usize, what: &'static str) -> Result<f64> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    let norm = vec_norm(v);
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    if norm == 0.0 {
        return Err(Error::ZeroVector(what));
    }
    Ok(norm)
}

/// `Ψ = normalize(|λ₊⟩⊗ψ + |λ₋⟩⊗Xψ)`
pub fn dephasing_state(sol: &RiccatiSolution, diag: &ObservableDiag, psi: &CVector) -> Result<DephasingState> {
    check_env(psi, sol.space().dim(), "seed")?;
    let x_psi = &sol.x * psi;
    let raw = tensor_vec(&diag.ket_plus(), psi) + tensor_vec(&diag.ket_minus(), &x_psi);
    let norm = vec_norm(&raw);
    Ok(DephasingState {
        vec: raw / re(norm),
        kind: StateKind::Psi,
        seed: psi.clone(),
        seed_normalized: psi / re(norm),
        branch: Some((Branch::Psi, psi / re(norm))),
    })
}

/// `Φ = normalize(|λ₋⟩⊗φ − |λ₊⟩⊗X†φ)`, orthogonal to every `Ψ`.
pub fn orthogonal_state(sol: &RiccatiSolution, diag: &ObservableDiag, phi: &CVector) -> Result<DephasingState> {
    check_env(phi, sol.space().dim(), "seed")?;
    let xd_phi = sol.x.adjoint() * phi;
    let raw = tensor_vec(&diag.ket_minus(), phi) - tensor_vec(&diag.ket_plus(), &xd_phi);
    let norm = vec_norm(&raw);
    Ok(DephasingState {
        vec: raw / re(norm),
        kind: StateKind::Phi,
        seed: phi.clone(),
        seed_normalized: phi / re(norm),
        branch: Some((Branch::Phi, phi / re(norm))),
    })
}

/// `P_± = (I ± X)/2`
pub fn parity_projector(x_k: &CMatrix, eps: i8) -> CMatrix {
    let id = CMatrix::identity(x_k.nrows(), x_k.ncols());
    (id + x_k * re(f64::from(eps.signum()))) * re(0.5)
}

/// `Ψ_ε = normalize(|+⟩⊗P_ε ψ + |−⟩⊗P_{−ε} ψ)` in the σz basis.
///
/// For `ε = +1` this is the graph-branch state in the σx frame with seed
/// `ψ/√2`; for `ε = −1` it is the orthogonal-branch state with seed
/// `−X_k ψ/√2`. Either way `⟨σx⟩ = 0` for all times.
pub fn rabi_parity_state(x_k: &CMatrix, psi: &CVector, eps: i8) -> Result<DephasingState> {
    if eps != 1 && eps != -1 {
        return Err(Error::InvalidArgument("parity label must be +1 or -1"));
    }
    let dim = x_k.nrows();
    ensure_square(x_k, dim)?;
    check_env(psi, dim, "seed")?;
    let same = parity_projector(x_k, eps) * psi;
    if vec_norm(&same) <= 1e-14 * vec_norm(psi) {
        return Err(Error::EmptyParitySector);
    }
    let other = parity_projector(x_k, -eps) * psi;
    let mut raw = CVector::zeros(2 * dim);
    raw.rows_mut(0, dim).copy_from(&same);
    raw.rows_mut(dim, dim).copy_from(&other);
    let norm = vec_norm(&raw);
    let scale = re(1.0 / (core::f64::consts::SQRT_2 * norm));
    let branch = if eps == 1 { (Branch::Psi, psi * scale) } else { (Branch::Phi, -(x_k * psi) * scale) };
    Ok(DephasingState {
        vec: raw / re(norm),
        kind: StateKind::RabiParity(eps),
        seed: psi.clone(),
        seed_normalized: psi / re(norm),
        branch: Some(branch),
    })
}

/// `normalize(q ⊗ ψ)` for a qubit vector `q`.
pub fn product_state(qubit: &CVector, psi: &CVector) -> Result<DephasingState> {
    if qubit.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: qubit.len() });
    }
    check_env(qubit, 2, "qubit")?;
    check_env(psi, psi.len(), "seed")?;
    let raw = tensor_vec(qubit, psi);
    let norm = vec_norm(&raw);
    Ok(DephasingState {
        vec: raw / re(norm),
        kind: StateKind::Product,
        seed: psi.clone(),
        seed_normalized: psi / re(norm),
        branch: None,
    })
}

/// Schmidt coefficients of a qubit ⊗ environment pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct Schmidt {
    pub rank: usize,
    /// Singular values of the 2×dim coefficient matrix, descending.
    pub coefficients: Vec<f64>,
}

impl Schmidt {
    pub fn is_separable(&self) -> bool {
        self.rank <= 1
    }
}

pub fn schmidt_analysis(vec: &CVector, space: FockSpace, tol: f64) -> Result<Schmidt> {
    let dim = space.dim();
    if vec.len() != 2 * dim {
        return Err(Error::DimensionMismatch { expected: 2 * dim, found: vec.len() });
    }
    let m = CMatrix::from_fn(2, dim, |q, n| vec[q * dim + n]);
    let mut coefficients: Vec<f64> = SVD::new(m, false, false).singular_values.iter().copied().collect();
    coefficients.sort_by(|a, b| b.total_cmp(a));
    let rank = coefficients.iter().filter(|&&s| s > tol).count();
    Ok(Schmidt { rank, coefficients })
}
