//! Model Hamiltonians and their block form in the eigenframe of a qubit
//! observable.
//!
//! Given a 2×2 Hermitian observable Λ with `u†Λu = diag(λ₊, λ₋)`, the total
//! Hamiltonian is rotated to `K = (u†⊗I) H (u⊗I)` and split as
//!
//! ```text
//! K = |+⟩⟨+| ⊗ H₊ + |−⟩⟨−| ⊗ H₋ + |+⟩⟨−| ⊗ V + |−⟩⟨+| ⊗ V†
//! ```
//!
//! The columns of `u` are the observable eigenvectors `|λ±⟩ = u|±⟩`.

use crate::linalg::{cabs, ensure_hermitian, ensure_square, re};
use crate::operators::{fock_ladder, ladder_power, qubit_ops, tensor, FockSpace};
use crate::{CMatrix, CVector, Error, Result, C64};

const HERMITIAN_TOL: f64 = 1e-10;

/// Eigen-decomposition of a 2×2 Hermitian qubit observable.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableDiag {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Unitary whose columns are `|λ₊⟩`, `|λ₋⟩`.
    pub u: CMatrix,
    /// Set when λ₊ = λ₋; every state then conserves the observable.
    pub degenerate: bool,
}

impl ObservableDiag {
    pub fn ket_plus(&self) -> CVector {
        self.u.column(0).into_owned()
    }

    pub fn ket_minus(&self) -> CVector {
        self.u.column(1).into_owned()
    }

    /// The observable rebuilt from its spectral data.
    pub fn observable(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&CVector::from_vec(alloc::vec![re(self.lambda_plus), re(self.lambda_minus)]));
        &self.u * d * self.u.adjoint()
    }

    /// `u ⊗ I_E`, mapping eigenframe vectors back to the σz frame.
    pub fn frame(&self, space: FockSpace) -> CMatrix {
        tensor(&self.u, &CMatrix::identity(space.dim(), space.dim()))
    }

    /// True when the eigenframe coincides with the σz basis.
    pub fn is_identity_frame(&self, tol: f64) -> bool {
        (&self.u - CMatrix::identity(2, 2)).iter().all(|z| cabs(*z) <= tol)
    }
}

pub fn diagonalize_observable(lambda: &CMatrix) -> Result<ObservableDiag> {
    ensure_square(lambda, 2)?;
    ensure_hermitian(lambda, "observable", HERMITIAN_TOL)?;
    let a = lambda[(0, 0)].re;
    let d = lambda[(1, 1)].re;
    let b = lambda[(0, 1)];
    let mean = 0.5 * (a + d);
    let radius = libm::hypot(0.5 * (a - d), cabs(b));
    let lambda_plus = mean + radius;
    let lambda_minus = mean - radius;

    if radius < 1e-12 {
        return Ok(ObservableDiag { lambda_plus, lambda_minus, u: CMatrix::identity(2, 2), degenerate: true });
    }

    // Two algebraically equivalent kernel vectors of Λ − λ₊; keep the larger.
    let first = [b, re(lambda_plus - a)];
    let second = [re(lambda_plus - d), b.conj()];
    let size = |v: &[C64; 2]| libm::hypot(cabs(v[0]), cabs(v[1]));
    let plus = if size(&first) >= size(&second) { first } else { second };
    let n = size(&plus);
    let plus = [plus[0] / n, plus[1] / n];
    let minus = [-plus[1].conj(), plus[0].conj()];

    let mut u = CMatrix::from_column_slice(2, 2, &[plus[0], plus[1], minus[0], minus[1]]);
    for j in 0..2 {
        fix_column_phase(&mut u, j);
    }
    Ok(ObservableDiag { lambda_plus, lambda_minus, u, degenerate: false })
}

/// Rotate the column so its largest-magnitude entry (first one on ties) is
/// real and non-negative.
fn fix_column_phase(u: &mut CMatrix, j: usize) {
    let mags: [f64; 2] = [cabs(u[(0, j)]), cabs(u[(1, j)])];
    let max = mags[0].max(mags[1]);
    let pivot = if mags[0] >= max - 1e-12 { 0 } else { 1 };
    let z = u[(pivot, j)];
    let rot = z.conj() / cabs(z);
    for i in 0..2 {
        u[(i, j)] *= rot;
    }
}

/// `K = (u†⊗I) H (u⊗I)`.
pub fn to_kamiltonian(h_total: &CMatrix, diag: &ObservableDiag, space: FockSpace) -> Result<CMatrix> {
    ensure_square(h_total, space.joint_dim())?;
    ensure_hermitian(h_total, "total Hamiltonian", HERMITIAN_TOL)?;
    let w = diag.frame(space);
    Ok(w.adjoint() * h_total * w)
}

/// Inverse of [`to_kamiltonian`].
pub fn from_kamiltonian(k_mat: &CMatrix, diag: &ObservableDiag, space: FockSpace) -> Result<CMatrix> {
    ensure_square(k_mat, space.joint_dim())?;
    let w = diag.frame(space);
    Ok(&w * k_mat * w.adjoint())
}

/// The environment operators `(H₊, H₋, V)` of a Hermitian Kamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockHamiltonian {
    pub h_plus: CMatrix,
    pub h_minus: CMatrix,
    pub v: CMatrix,
    pub space: FockSpace,
}

impl BlockHamiltonian {
    pub fn new(h_plus: CMatrix, h_minus: CMatrix, v: CMatrix, space: FockSpace) -> Result<Self> {
        let dim = space.dim();
        ensure_square(&h_plus, dim)?;
        ensure_square(&h_minus, dim)?;
        ensure_square(&v, dim)?;
        ensure_hermitian(&h_plus, "H+", HERMITIAN_TOL)?;
        ensure_hermitian(&h_minus, "H-", HERMITIAN_TOL)?;
        Ok(Self { h_plus, h_minus, v, space })
    }

    pub fn assemble(&self) -> CMatrix {
        block_assemble(self)
    }
}

pub fn block_decompose(k_mat: &CMatrix, space: FockSpace) -> Result<BlockHamiltonian> {
    let dim = space.dim();
    ensure_square(k_mat, 2 * dim)?;
    ensure_hermitian(k_mat, "Kamiltonian", HERMITIAN_TOL)?;
    Ok(BlockHamiltonian {
        h_plus: k_mat.view((0, 0), (dim, dim)).into_owned(),
        h_minus: k_mat.view((dim, dim), (dim, dim)).into_owned(),
        v: k_mat.view((0, dim), (dim, dim)).into_owned(),
        space,
    })
}

pub fn block_assemble(blocks: &BlockHamiltonian) -> CMatrix {
    let dim = blocks.space.dim();
    let mut k = CMatrix::zeros(2 * dim, 2 * dim);
    k.view_mut((0, 0), (dim, dim)).copy_from(&blocks.h_plus);
    k.view_mut((dim, dim), (dim, dim)).copy_from(&blocks.h_minus);
    k.view_mut((0, dim), (dim, dim)).copy_from(&blocks.v);
    k.view_mut((dim, 0), (dim, dim)).copy_from(&blocks.v.adjoint());
    k
}

/// Jaynes–Cummings parameters for `H = ω σz + ν a†a + g* σ₊a + g σ₋a†`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JcParams {
    pub omega: f64,
    pub nu: f64,
    pub g: C64,
}

impl JcParams {
    pub fn new(omega: f64, nu: f64, g: C64) -> Self {
        Self { omega, nu, g }
    }

    /// Parameters with the given detuning, `ω = δ + ν/2`.
    pub fn from_detuning(delta: f64, nu: f64, g: C64) -> Self {
        Self { omega: delta + 0.5 * nu, nu, g }
    }

    /// Detuning of the commuting split. With σz = diag(1, −1) the conserved
    /// excitation number is `a†a + σz/2`, so the detuning is `ω − ν/2`.
    pub fn delta(&self) -> f64 {
        self.omega - 0.5 * self.nu
    }
}

/// Full JC Hamiltonian together with its commuting split `h_total = h0 + v_int`.
#[derive(Clone, Debug)]
pub struct JcModel {
    pub h_total: CMatrix,
    /// `ν (a†a + σz/2)`
    pub h0: CMatrix,
    /// `δ σz + g* σ₊a + g σ₋a†`
    pub v_int: CMatrix,
}

pub fn jc_model(p: JcParams, space: FockSpace) -> JcModel {
    let dim = space.dim();
    let l = fock_ladder(space);
    let q = qubit_ops();
    let id_e = CMatrix::identity(dim, dim);
    let interaction = tensor(&q.plus, &l.a) * p.g.conj() + tensor(&q.minus, &l.a_dag) * p.g;
    let sz = tensor(&q.z, &id_e);
    let n = tensor(&q.id, &l.number);
    let h0 = (&n + &sz * re(0.5)) * re(p.nu);
    let v_int = &sz * re(p.delta()) + &interaction;
    let h_total = &h0 + &v_int;
    JcModel { h_total, h0, v_int }
}

/// Blocks of the JC interaction part `v_int` in the σz frame:
/// `H₊ = δ`, `H₋ = −δ`, `V = g* a`.
pub fn jc_blocks(p: JcParams, space: FockSpace) -> BlockHamiltonian {
    let dim = space.dim();
    let id = CMatrix::identity(dim, dim);
    BlockHamiltonian {
        h_plus: &id * re(p.delta()),
        h_minus: &id * re(-p.delta()),
        v: fock_ladder(space).a * p.g.conj(),
        space,
    }
}

/// k-photon Rabi parameters for
/// `H = ω σz + ν a†a + σx ⊗ (g* aᵏ + g a†ᵏ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiParams {
    pub omega: f64,
    pub nu: f64,
    pub g: C64,
    pub k: usize,
}

fn check_photon_number(k: usize, space: FockSpace) -> Result<()> {
    if k == 0 || k >= space.dim() {
        return Err(Error::PhotonNumberOutOfRange { k, dim: space.dim() });
    }
    Ok(())
}

/// `g* aᵏ + g a†ᵏ`
pub fn rabi_coupling(p: RabiParams, space: FockSpace) -> Result<CMatrix> {
    check_photon_number(p.k, space)?;
    let ak = ladder_power(&fock_ladder(space).a, p.k);
    Ok(&ak * p.g.conj() + ak.adjoint() * p.g)
}

pub fn rabi_model(p: RabiParams, space: FockSpace) -> Result<CMatrix> {
    let coupling = rabi_coupling(p, space)?;
    let dim = space.dim();
    let q = qubit_ops();
    let l = fock_ladder(space);
    Ok(tensor(&q.z, &CMatrix::identity(dim, dim)) * re(p.omega)
        + tensor(&q.id, &l.number) * re(p.nu)
        + tensor(&q.x, &coupling))
}

/// Closed-form blocks of the Rabi Kamiltonian in the σx eigenframe:
/// `H± = ν a†a ± (g* aᵏ + g a†ᵏ)`, `V = ω I`.
pub fn rabi_blocks(p: RabiParams, space: FockSpace) -> Result<BlockHamiltonian> {
    let coupling = rabi_coupling(p, space)?;
    let dim = space.dim();
    let n = fock_ladder(space).number * re(p.nu);
    Ok(BlockHamiltonian {
        h_plus: &n + &coupling,
        h_minus: &n - &coupling,
        v: CMatrix::identity(dim, dim) * re(p.omega),
        space,
    })
}
