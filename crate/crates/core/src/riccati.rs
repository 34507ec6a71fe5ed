//! Operator Riccati equation `X V X + X H₊ − H₋ X − V† = 0`.
//!
//! A solution `X` makes the graph `{(ψ, Xψ)}` invariant under the block
//! Kamiltonian, so `K (|+⟩ψ + |−⟩Xψ) = |+⟩K₊ψ + |−⟩XK₊ψ` with
//! `K₊ = H₊ + VX`; the orthogonal complement evolves under
//! `K₋ = H₋ − V†X†`. Three solvers are provided: the closed-form JC and
//! Rabi solutions, and a numerical one that reads `X` off an invariant
//! subspace of the assembled Kamiltonian.

use alloc::vec::Vec;

use crate::blockform::{jc_blocks, rabi_blocks, BlockHamiltonian, JcParams, RabiParams};
use crate::linalg::{
    cabs, condition_number, ensure_finite, ensure_square, frobenius, general_eigen, hermitian_eigen,
    hermiticity_defect, identity, inverse, max_abs, re, restricted_norm, vec_norm,
};
use crate::operators::{fock_ladder, generalized_parity, FockSpace};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Residual bound for a numerically extracted `X`.
pub const GRAPH_RESIDUAL_TOL: f64 = 1e-8;
/// Largest acceptable condition number of the top block of the selected
/// eigenvectors.
pub const BRANCH_CONDITION_CAP: f64 = 1e8;
/// Largest acceptable condition number of a similarity transform.
pub const SIMILARITY_CONDITION_CAP: f64 = 1e10;
/// Interior residual required before the branch generators are formed.
pub const KAMILTONIAN_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverMethod {
    JcAnalytic,
    RabiAnalytic,
    GraphSubspace,
}

/// A solution `X` of the Riccati equation with its derived operators.
#[derive(Clone, Debug)]
pub struct RiccatiSolution {
    pub x: CMatrix,
    /// `K₊ = H₊ + VX`
    pub k_plus: CMatrix,
    /// `K₋ = H₋ − V†X†`
    pub k_minus: CMatrix,
    /// `η = I + X†X`, the metric making `K₊` Hermitian.
    pub eta: CMatrix,
    /// `ξ = I + XX†`, the metric making `K₋` Hermitian.
    pub xi: CMatrix,
    pub residual_norm: f64,
    /// Residual restricted to levels below the guard band.
    pub interior_residual_norm: f64,
    pub blocks: BlockHamiltonian,
    pub method: SolverMethod,
    pub note: Option<&'static str>,
}

impl RiccatiSolution {
    fn assemble(blocks: BlockHamiltonian, x: CMatrix, method: SolverMethod, note: Option<&'static str>) -> Self {
        let (residual_norm, interior_residual_norm) = residual_norms(&x, &blocks);
        let k_plus = &blocks.h_plus + &blocks.v * &x;
        let k_minus = &blocks.h_minus - blocks.v.adjoint() * x.adjoint();
        let dim = blocks.space.dim();
        let eta = identity(dim) + x.adjoint() * &x;
        let xi = identity(dim) + &x * x.adjoint();
        Self { x, k_plus, k_minus, eta, xi, residual_norm, interior_residual_norm, blocks, method, note }
    }

    pub fn space(&self) -> FockSpace {
        self.blocks.space
    }
}

/// `X V X + X H₊ − H₋ X − V†`
pub fn residual(x: &CMatrix, blocks: &BlockHamiltonian) -> CMatrix {
    let xv = x * &blocks.v;
    &xv * x + x * &blocks.h_plus - &blocks.h_minus * x - blocks.v.adjoint()
}

/// Frobenius norm of the residual over the whole space and over the interior levels.
pub fn residual_norms(x: &CMatrix, blocks: &BlockHamiltonian) -> (f64, f64) {
    let r = residual(x, blocks);
    let interior: Vec<usize> = (0..blocks.space.interior()).collect();
    (frobenius(&r), restricted_norm(&r, &interior))
}

/// JC form of the residual, `g* X a X + 2δ X − g a†`.
pub fn jc_residual(x: &CMatrix, p: JcParams, space: FockSpace) -> CMatrix {
    let l = fock_ladder(space);
    (x * &l.a * x) * p.g.conj() + x * re(2.0 * p.delta()) - l.a_dag * p.g
}

/// Subdiagonal coefficient `ξₙ = (−δ + √(δ² + |g|²(n+1))) / (g* √(n+1))`
/// of the JC solution `X = Σ ξₙ |n+1⟩⟨n|`.
pub fn jc_xi(p: JcParams, n: usize) -> C64 {
    let delta = p.delta();
    let s = libm::sqrt((n + 1) as f64);
    let root = libm::sqrt(delta * delta + p.g.norm_sqr() * (n + 1) as f64);
    if delta > 0.0 {
        // Rationalized to avoid cancelling −δ against the root.
        p.g * s / (delta + root)
    } else {
        re(root - delta) / (p.g.conj() * s)
    }
}

/// `√(δ² + |g|² n)`
pub fn jc_root(p: JcParams, n: usize) -> f64 {
    let delta = p.delta();
    libm::sqrt(delta * delta + p.g.norm_sqr() * n as f64)
}

/// Closed-form JC solution on the blocks of the commuting interaction
/// part (`H₊ = δ`, `H₋ = −δ`, `V = g* a`). The top column of `X` is zero
/// because `|dim⟩` is outside the truncation.
pub fn solve_jc_analytic(p: JcParams, space: FockSpace) -> RiccatiSolution {
    let dim = space.dim();
    let blocks = jc_blocks(p, space);
    let mut x = CMatrix::zeros(dim, dim);
    if p.g.norm_sqr() == 0.0 {
        return RiccatiSolution::assemble(
            blocks,
            x,
            SolverMethod::JcAnalytic,
            Some("g = 0: the construction is undefined; X = 0 solves the decoupled equation"),
        );
    }
    for n in 0..dim - 1 {
        x[(n + 1, n)] = jc_xi(p, n);
    }
    RiccatiSolution::assemble(blocks, x, SolverMethod::JcAnalytic, None)
}

/// Closed-form k-photon Rabi solution: the generalized parity `X_k`, which
/// does not depend on ω, ν or g.
pub fn solve_rabi_analytic(p: RabiParams, space: FockSpace) -> Result<RiccatiSolution> {
    let blocks = rabi_blocks(p, space)?;
    let x = generalized_parity(p.k, space)?;
    Ok(RiccatiSolution::assemble(blocks, x, SolverMethod::RabiAnalytic, None))
}

/// Eigenpairs of the assembled Kamiltonian with the weight `‖v_top‖²` of
/// each eigenvector on the `|+⟩` block, in ascending eigenvalue order.
/// Indices into this table are what [`solve_graph_subspace_with`] accepts.
pub fn graph_subspace_weights(blocks: &BlockHamiltonian) -> (Vec<f64>, Vec<f64>) {
    let (values, vectors) = hermitian_eigen(&blocks.assemble());
    let dim = blocks.space.dim();
    let weights = (0..2 * dim).map(|j| (0..dim).map(|i| vectors[(i, j)].norm_sqr()).sum::<f64>()).collect();
    (values, weights)
}

/// Numerical Riccati solution from an invariant subspace of the assembled
/// Kamiltonian whose eigenvectors are dominated by their top block.
/// Any `dim` eigenvectors with an invertible top block `T` and bottom
/// block `B` give a solution `X = B T⁻¹`.
pub fn solve_graph_subspace(blocks: &BlockHamiltonian) -> Result<RiccatiSolution> {
    solve_graph_subspace_with(blocks, None)
}

/// As [`solve_graph_subspace`], with an optional explicit choice of
/// `dim` eigenvector indices (ascending-eigenvalue order).
pub fn solve_graph_subspace_with(blocks: &BlockHamiltonian, selection: Option<&[usize]>) -> Result<RiccatiSolution> {
    let dim = blocks.space.dim();
    let k = blocks.assemble();
    ensure_finite(&k)?;
    let (_, vectors) = hermitian_eigen(&k);
    let weights: Vec<f64> = (0..2 * dim).map(|j| (0..dim).map(|i| vectors[(i, j)].norm_sqr()).sum::<f64>()).collect();

    let chosen: Vec<usize> = match selection {
        Some(idx) => {
            let mut seen = alloc::vec![false; 2 * dim];
            if idx.len() != dim || idx.iter().any(|&i| i >= 2 * dim || core::mem::replace(&mut seen[i], true)) {
                return Err(Error::InvalidArgument("branch override needs dim distinct eigenvector indices"));
            }
            idx.to_vec()
        }
        None => pivoted_selection(&vectors, dim),
    };

    let top = CMatrix::from_fn(dim, dim, |i, j| vectors[(i, chosen[j])]);
    let bottom = CMatrix::from_fn(dim, dim, |i, j| vectors[(dim + i, chosen[j])]);
    let condition = condition_number(&top);
    if !(condition <= BRANCH_CONDITION_CAP) {
        return Err(Error::BranchSelection { condition, weights });
    }
    // X T = B, solved as Tᵀ Xᵀ = Bᵀ.
    let x = top
        .transpose()
        .lu()
        .solve(&bottom.transpose())
        .ok_or(Error::BranchSelection { condition: f64::INFINITY, weights: weights.clone() })?
        .transpose();
    let sol = RiccatiSolution::assemble(blocks.clone(), x, SolverMethod::GraphSubspace, None);
    if !(sol.residual_norm < GRAPH_RESIDUAL_TOL) {
        return Err(Error::ResidualTooLarge { residual: sol.residual_norm, tolerance: GRAPH_RESIDUAL_TOL });
    }
    Ok(sol)
}

/// Greedy column pivoting on the top blocks: repeatedly take the
/// eigenvector whose top block has the largest component outside the span
/// of those already taken. The first pick is the largest weight, and two
/// eigenvectors sharing a top direction are never both taken. Exact ties
/// go to the lower index.
fn pivoted_selection(vectors: &CMatrix, dim: usize) -> Vec<usize> {
    let mut r = vectors.rows(0, dim).into_owned();
    let mut norms: Vec<f64> = (0..2 * dim).map(|j| r.column(j).norm_squared()).collect();
    let mut taken = alloc::vec![false; 2 * dim];
    let mut chosen = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut best = usize::MAX;
        for j in 0..2 * dim {
            if !taken[j] && (best == usize::MAX || norms[j] > norms[best] * (1.0 + 1e-12)) {
                best = j;
            }
        }
        taken[best] = true;
        chosen.push(best);
        let q = r.column(best) / re(libm::sqrt(norms[best]));
        for j in 0..2 * dim {
            if !taken[j] {
                let overlap = q.dotc(&r.column(j));
                let mut col = r.column_mut(j);
                col.axpy(-overlap, &q, re(1.0));
                norms[j] = col.norm_squared();
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Block similarity `S = [[I, −X†], [X, I]]`.
pub fn block_similarity(x: &CMatrix) -> CMatrix {
    let dim = x.nrows();
    let mut s = identity(2 * dim);
    s.view_mut((0, dim), (dim, dim)).copy_from(&(-x.adjoint()));
    s.view_mut((dim, 0), (dim, dim)).copy_from(x);
    s
}

/// Branch generators `(K₊, K₋)` for an `X` that solves the Riccati equation
/// on the interior.
pub fn kamiltonians(blocks: &BlockHamiltonian, x: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    ensure_square(x, blocks.space.dim())?;
    let (_, interior) = residual_norms(x, blocks);
    if !(interior < KAMILTONIAN_RESIDUAL_TOL) {
        return Err(Error::ResidualTooLarge { residual: interior, tolerance: KAMILTONIAN_RESIDUAL_TOL });
    }
    let condition = condition_number(&block_similarity(x));
    if !(condition <= SIMILARITY_CONDITION_CAP) {
        return Err(Error::IllConditioned { what: "block similarity", condition });
    }
    let k_plus = &blocks.h_plus + &blocks.v * x;
    let k_minus = &blocks.h_minus - blocks.v.adjoint() * x.adjoint();
    Ok((k_plus, k_minus))
}

/// `‖S⁻¹ K S − diag(K₊, K₋)‖` over the interior joint indices.
pub fn similarity_defect(sol: &RiccatiSolution) -> Result<f64> {
    let space = sol.space();
    let dim = space.dim();
    let s = block_similarity(&sol.x);
    let s_inv = inverse(&s).ok_or(Error::IllConditioned { what: "block similarity", condition: f64::INFINITY })?;
    let mut target = CMatrix::zeros(2 * dim, 2 * dim);
    target.view_mut((0, 0), (dim, dim)).copy_from(&sol.k_plus);
    target.view_mut((dim, dim), (dim, dim)).copy_from(&sol.k_minus);
    let d = s_inv * sol.blocks.assemble() * s - target;
    Ok(restricted_norm(&d, &space.interior_joint_indices()))
}

/// `max(‖ηK₊ − K₊†η‖, ‖ξK₋ − K₋†ξ‖)`
pub fn pseudo_hermiticity_check(sol: &RiccatiSolution) -> f64 {
    let plus = &sol.eta * &sol.k_plus - sol.k_plus.adjoint() * &sol.eta;
    let minus = &sol.xi * &sol.k_minus - sol.k_minus.adjoint() * &sol.xi;
    frobenius(&plus).max(frobenius(&minus))
}

/// Biorthonormal eigensystem of a diagonalizable `K₊`: `ψₙ = S|n⟩`,
/// `φₙ = (S⁻¹)†|n⟩`, with `ψₙ` unit-normalized.
#[derive(Clone, Debug)]
pub struct BiorthoSystem {
    pub energies: Vec<C64>,
    /// Right eigenvectors `ψₙ` as columns.
    pub psi: CMatrix,
    /// Left eigenvectors `φₙ` as columns, `⟨ψₙ|φₘ⟩ = δₙₘ`.
    pub phi: CMatrix,
    /// Condition number of the eigenvector matrix `S`.
    pub condition: f64,
}

/// Deviations from the defining relations of a biorthonormal system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiorthoDefects {
    /// `maxₙ ‖K₊ψₙ − Eₙψₙ‖`
    pub right_eigen: f64,
    /// `maxₙ ‖K₊†φₙ − Eₙ*φₙ‖`
    pub left_eigen: f64,
    /// `max |Σₙ|ψₙ⟩⟨φₙ| − I|`
    pub completeness: f64,
    /// `max |⟨ψₙ|φₘ⟩ − δₙₘ|`
    pub biorthonormality: f64,
    pub max_imag_energy: f64,
}

impl BiorthoDefects {
    pub fn max(&self) -> f64 {
        self.right_eigen.max(self.left_eigen).max(self.completeness).max(self.biorthonormality)
    }
}

impl BiorthoSystem {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn psi_vec(&self, n: usize) -> CVector {
        self.psi.column(n).into_owned()
    }

    pub fn phi_vec(&self, n: usize) -> CVector {
        self.phi.column(n).into_owned()
    }

    pub fn defects(&self, k_plus: &CMatrix) -> BiorthoDefects {
        let n = self.len();
        let mut right_eigen = 0.0f64;
        let mut left_eigen = 0.0f64;
        let k_dag = k_plus.adjoint();
        for j in 0..n {
            let e = self.energies[j];
            let psi = self.psi_vec(j);
            let phi = self.phi_vec(j);
            right_eigen = right_eigen.max(vec_norm(&(k_plus * &psi - &psi * e)));
            left_eigen = left_eigen.max(vec_norm(&(&k_dag * &phi - &phi * e.conj())));
        }
        let completeness = max_abs(&(&self.psi * self.phi.adjoint() - identity(n)));
        let biorthonormality = max_abs(&(self.psi.adjoint() * &self.phi - identity(n)));
        let max_imag_energy = self.energies.iter().fold(0.0f64, |m, e| m.max(e.im.abs()));
        BiorthoDefects { right_eigen, left_eigen, completeness, biorthonormality, max_imag_energy }
    }
}

pub fn biorthonormal_system(k_plus: &CMatrix) -> Result<BiorthoSystem> {
    let n = k_plus.nrows();
    ensure_square(k_plus, n)?;
    ensure_finite(k_plus)?;
    if hermiticity_defect(k_plus) <= 1e-12 * max_abs(k_plus).max(1.0) {
        let (values, vectors) = hermitian_eigen(k_plus);
        return Ok(BiorthoSystem {
            energies: values.into_iter().map(re).collect(),
            phi: vectors.clone(),
            psi: vectors,
            condition: 1.0,
        });
    }
    let (energies, s) = general_eigen(k_plus)?;
    let condition = condition_number(&s);
    if !(condition <= SIMILARITY_CONDITION_CAP) {
        return Err(Error::IllConditioned { what: "eigenvector matrix of K+", condition });
    }
    let s_inv = inverse(&s).ok_or(Error::IllConditioned { what: "eigenvector matrix of K+", condition })?;
    Ok(BiorthoSystem { energies, phi: s_inv.adjoint(), psi: s, condition })
}

/// Smallest eigenvalue of a Hermitian metric.
pub fn metric_floor(metric: &CMatrix) -> f64 {
    hermitian_eigen(metric).0.first().copied().unwrap_or(f64::NAN)
}

/// True when `|z| ≤ tol` for every entry.
pub fn is_negligible(m: &CMatrix, tol: f64) -> bool {
    m.iter().all(|z| cabs(*z) <= tol)
}
