//! Truncated bosonic and qubit operators.
//!
//! Composite operators always put the qubit factor first, so the basis of
//! the joint space is `|+,0⟩ … |+,dim−1⟩, |−,0⟩ … |−,dim−1⟩` where `|+⟩`,
//! `|−⟩` are the σz eigenstates with eigenvalues +1 and −1.

use alloc::vec::Vec;

use crate::linalg::{c, ensure_square, re};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Truncated Fock space `|0⟩ … |dim−1⟩` with the top `guard` levels
/// set aside as a leakage monitor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockSpace {
    dim: usize,
    guard: usize,
}

impl FockSpace {
    pub fn new(dim: usize, guard: usize) -> Result<Self> {
        if dim < 2 || guard >= dim {
            return Err(Error::InvalidSpace { dim, guard });
        }
        Ok(Self { dim, guard })
    }

    /// Guard band of `ceil(dim / 8)` levels.
    pub fn with_default_guard(dim: usize) -> Result<Self> {
        Self::new(dim, dim.div_ceil(8))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    /// Number of levels below the guard band.
    pub fn interior(&self) -> usize {
        self.dim - self.guard
    }

    /// Dimension of qubit ⊗ environment.
    pub fn joint_dim(&self) -> usize {
        2 * self.dim
    }

    /// Joint-space indices `q·dim + n` for both qubit states and every
    /// interior level `n`.
    pub fn interior_joint_indices(&self) -> Vec<usize> {
        let interior = self.interior();
        (0..2).flat_map(|q| (0..interior).map(move |n| q * self.dim + n)).collect()
    }
}

/// Annihilation, creation and number operators on a truncated space.
#[derive(Clone, Debug)]
pub struct Ladder {
    pub a: CMatrix,
    pub a_dag: CMatrix,
    pub number: CMatrix,
}

pub fn fock_ladder(space: FockSpace) -> Ladder {
    let dim = space.dim();
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = re(libm::sqrt(n as f64));
    }
    let a_dag = a.adjoint();
    let number = &a_dag * &a;
    Ladder { a, a_dag, number }
}

/// `a^k` on the truncated space.
pub fn ladder_power(a: &CMatrix, k: usize) -> CMatrix {
    let mut out = CMatrix::identity(a.nrows(), a.ncols());
    for _ in 0..k {
        out = &out * a;
    }
    out
}

/// Pauli matrices and qubit ladder operators in the σz eigenbasis `{|+⟩, |−⟩}`.
#[derive(Clone, Debug)]
pub struct QubitOps {
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
    /// σ₊ = |+⟩⟨−|
    pub plus: CMatrix,
    /// σ₋ = |−⟩⟨+|
    pub minus: CMatrix,
    pub id: CMatrix,
}

pub fn qubit_ops() -> QubitOps {
    let o = re(0.0);
    let l = re(1.0);
    QubitOps {
        x: CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        y: CMatrix::from_row_slice(2, 2, &[o, c(0.0, -1.0), c(0.0, 1.0), o]),
        z: CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        plus: CMatrix::from_row_slice(2, 2, &[o, l, o, o]),
        minus: CMatrix::from_row_slice(2, 2, &[o, o, l, o]),
        id: CMatrix::identity(2, 2),
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `|q⟩ ⊗ |e⟩` for a qubit vector `q` and environment vector `e`.
pub fn tensor_vec(q: &CVector, e: &CVector) -> CVector {
    q.kronecker(e)
}

/// Trace over the environment of an operator on the joint space.
pub fn partial_trace_env(m: &CMatrix, space: FockSpace) -> Result<CMatrix> {
    let dim = space.dim();
    ensure_square(m, 2 * dim)?;
    Ok(CMatrix::from_fn(2, 2, |p, q| (0..dim).map(|n| m[(p * dim + n, q * dim + n)]).sum::<C64>()))
}

/// Reduced qubit density matrix `Tr_E |v⟩⟨v|` of a joint-space vector.
pub fn partial_trace_pure(v: &CVector, space: FockSpace) -> Result<CMatrix> {
    let dim = space.dim();
    if v.len() != 2 * dim {
        return Err(Error::DimensionMismatch { expected: 2 * dim, found: v.len() });
    }
    Ok(CMatrix::from_fn(2, 2, |p, q| (0..dim).map(|n| v[p * dim + n] * v[q * dim + n].conj()).sum::<C64>()))
}

/// Generalized parity `X_k`: diagonal with `(−1)^⌊m/k⌋` at level `m`.
/// Reduces to the bosonic parity `(−1)^{a†a}` for `k = 1`.
pub fn generalized_parity(k: usize, space: FockSpace) -> Result<CMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("generalized parity needs k >= 1"));
    }
    let dim = space.dim();
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            re(0.0)
        } else if (i / k).is_multiple_of(2) {
            re(1.0)
        } else {
            re(-1.0)
        }
    }))
}

/// Fock state `|n⟩`.
pub fn fock_state(space: FockSpace, n: usize) -> Result<CVector> {
    if n >= space.dim() {
        return Err(Error::InvalidArgument("Fock level outside the truncated space"));
    }
    let mut v = CVector::zeros(space.dim());
    v[n] = re(1.0);
    Ok(v)
}

/// Coherent state `e^{−|α|²/2} Σ αⁿ/√n! |n⟩` truncated at level `cutoff`
/// (inclusive) and renormalized.
pub fn coherent_state(space: FockSpace, alpha: C64, cutoff: usize) -> Result<CVector> {
    if cutoff >= space.dim() {
        return Err(Error::InvalidArgument("coherent-state cutoff outside the truncated space"));
    }
    let mut v = CVector::zeros(space.dim());
    let mut amp = re(1.0);
    v[0] = amp;
    for n in 1..=cutoff {
        amp = amp * alpha / libm::sqrt(n as f64);
        v[n] = amp;
    }
    let norm = crate::linalg::vec_norm(&v);
    Ok(v / re(norm))
}

/// Highest occupied level plus one (0 for the zero vector).
pub fn support_len(v: &CVector) -> usize {
    v.iter().rposition(|z| z.norm_sqr() > 0.0).map_or(0, |i| i + 1)
}
