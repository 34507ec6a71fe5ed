//! Time evolution: the brute-force propagator used as an oracle, the
//! factorized branch propagator, and the reduced qubit quantities.

use alloc::vec::Vec;

use crate::blockform::{JcParams, ObservableDiag};
use crate::linalg::{
    c, cabs, ensure_finite, ensure_hermitian, ensure_square, hermitian_eigen, hermiticity_defect, identity, max_abs,
    phase, re, spectral_apply,
};
use crate::operators::{partial_trace_pure, support_len, FockSpace};
use crate::riccati::{jc_root, jc_xi, BiorthoSystem, RiccatiSolution, KAMILTONIAN_RESIDUAL_TOL};
use crate::states::Branch;
use crate::{CMatrix, CVector, Error, Result, C64};

const HERMITIAN_TOL: f64 = 1e-10;

/// Uniform time grid `t_start, …, t_end` with `steps` samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) {
            return Err(Error::InvalidArgument("time grid bounds must be finite"));
        }
        if t_end <= t_start {
            return Err(Error::InvalidArgument("time grid needs t_end > t_start"));
        }
        if steps < 2 {
            return Err(Error::InvalidArgument("time grid needs at least 2 steps"));
        }
        Ok(Self { t_start, t_end, steps })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self, j: usize) -> f64 {
        if j + 1 == self.steps {
            self.t_end
        } else {
            self.t_start + (self.t_end - self.t_start) * (j as f64) / ((self.steps - 1) as f64)
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.steps).map(|j| self.time(j)).collect()
    }
}

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| cabs(*z)).sum::<f64>()).fold(0.0, f64::max)
}

/// `e^A`.
///
/// With `hermitian_hint` and `iA` Hermitian, the exponential is taken from
/// the eigendecomposition of `iA`. Otherwise it uses degree-13 Padé
/// scaling and squaring.
pub fn matrix_exponential(a: &CMatrix, hermitian_hint: bool) -> Result<CMatrix> {
    let n = a.nrows();
    ensure_square(a, n)?;
    ensure_finite(a)?;
    if hermitian_hint {
        let h = a * c(0.0, 1.0);
        if hermiticity_defect(&h) <= HERMITIAN_TOL * max_abs(&h).max(1.0) {
            let (values, vectors) = hermitian_eigen(&h);
            let mut scaled = vectors.clone();
            for (j, &l) in values.iter().enumerate() {
                let p = phase(-l);
                for z in scaled.column_mut(j).iter_mut() {
                    *z *= p;
                }
            }
            return Ok(scaled * vectors.adjoint());
        }
    }
    pade13(a)
}

fn pade13(a: &CMatrix) -> Result<CMatrix> {
    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371_920_351_148_152;
    let n = a.nrows();
    let norm = one_norm(a);
    let s = if norm > THETA13 { libm::ceil(libm::log2(norm / THETA13)) as i32 } else { 0 };
    let a = a * re(libm::scalbn(1.0, -s));
    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * re(B[13]) + &a4 * re(B[11]) + &a2 * re(B[9]))
        + &a6 * re(B[7])
        + &a4 * re(B[5])
        + &a2 * re(B[3])
        + &id * re(B[1]);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * re(B[12]) + &a4 * re(B[10]) + &a2 * re(B[8]))
        + &a6 * re(B[6])
        + &a4 * re(B[4])
        + &a2 * re(B[2])
        + &id * re(B[0]);
    let mut r = (&v - &u)
        .lu()
        .solve(&(&v + &u))
        .ok_or(Error::IllConditioned { what: "Pade denominator", condition: f64::INFINITY })?;
    for _ in 0..s {
        r = &r * &r;
    }
    ensure_finite(&r)?;
    Ok(r)
}

/// Evolution under a fixed Hermitian generator, diagonalized once.
#[derive(Clone, Debug)]
pub struct HermitianPropagator {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl HermitianPropagator {
    pub fn new(h: &CMatrix, what: &'static str) -> Result<Self> {
        ensure_finite(h)?;
        ensure_hermitian(h, what, HERMITIAN_TOL)?;
        let (values, vectors) = hermitian_eigen(h);
        Ok(Self { values, vectors })
    }

    /// `e^{−iHt} v`
    pub fn apply(&self, t: f64, v: &CVector) -> CVector {
        spectral_apply(&self.values, &self.vectors, |l| phase(-l * t), v)
    }
}

/// `e^{−iHt}|Ψ(0)⟩` on every grid time.
pub fn propagate_exact(h_total: &CMatrix, state: &CVector, grid: &TimeGrid) -> Result<Vec<CVector>> {
    if state.len() != h_total.nrows() {
        return Err(Error::DimensionMismatch { expected: h_total.nrows(), found: state.len() });
    }
    let prop = HermitianPropagator::new(h_total, "Hamiltonian")?;
    Ok(grid.times().into_iter().map(|t| prop.apply(t, state)).collect())
}

/// Branch generator evolution: eigendecomposition when Hermitian, a
/// matrix exponential per time otherwise.
enum BranchEvolution {
    Hermitian(HermitianPropagator),
    General(CMatrix),
}

impl BranchEvolution {
    fn new(k: &CMatrix) -> Result<Self> {
        ensure_finite(k)?;
        if hermiticity_defect(k) <= 1e-12 * max_abs(k).max(1.0) {
            Ok(Self::Hermitian(HermitianPropagator::new(k, "branch generator")?))
        } else {
            Ok(Self::General(k.clone()))
        }
    }

    fn apply(&self, t: f64, v: &CVector) -> Result<CVector> {
        match self {
            Self::Hermitian(p) => Ok(p.apply(t, v)),
            Self::General(k) => Ok(matrix_exponential(&(k * c(0.0, -t)), false)? * v),
        }
    }
}

/// Check that a seed vanishes on the guard band.
pub fn check_guard_band(seed: &CVector, space: FockSpace) -> Result<()> {
    let len = support_len(seed);
    if len > space.interior() {
        return Err(Error::GuardBandSupport { level: len - 1, amplitude: cabs(seed[len - 1]) });
    }
    Ok(())
}

/// Branch vector in the observable frame from the evolved environment part.
fn branch_vector(branch: Branch, x: &CMatrix, env_t: &CVector) -> CVector {
    let dim = env_t.len();
    let (top, bottom) = match branch {
        Branch::Psi => (env_t.clone(), x * env_t),
        Branch::Phi => (-(x.adjoint() * env_t), env_t.clone()),
    };
    let mut out = CVector::zeros(2 * dim);
    out.rows_mut(0, dim).copy_from(&top);
    out.rows_mut(dim, dim).copy_from(&bottom);
    out
}

/// Environment part of a branch at every grid time: `e^{−iK₊t}ψ` on the
/// graph branch, `e^{−iK₋t}φ` on the orthogonal one.
pub fn evolve_branch_seed(
    sol: &RiccatiSolution,
    branch: Branch,
    seed: &CVector,
    grid: &TimeGrid,
) -> Result<Vec<CVector>> {
    let dim = sol.space().dim();
    if seed.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: seed.len() });
    }
    if !(sol.interior_residual_norm < KAMILTONIAN_RESIDUAL_TOL) {
        return Err(Error::ResidualTooLarge {
            residual: sol.interior_residual_norm,
            tolerance: KAMILTONIAN_RESIDUAL_TOL,
        });
    }
    check_guard_band(seed, sol.space())?;
    let generator = match branch {
        Branch::Psi => &sol.k_plus,
        Branch::Phi => &sol.k_minus,
    };
    let evo = BranchEvolution::new(generator)?;
    grid.times().into_iter().map(|t| evo.apply(t, seed)).collect()
}

/// Factorized evolution `|+⟩⊗e^{−iK₊t}ψ + |−⟩⊗Xe^{−iK₊t}ψ` (or the
/// orthogonal-branch analogue), mapped to the lab frame by `u⊗I` and, when
/// a commuting part `h0` is given, multiplied by `e^{−iH₀t}`.
pub fn propagate_factorized(
    sol: &RiccatiSolution,
    diag: &ObservableDiag,
    branch: Branch,
    seed: &CVector,
    grid: &TimeGrid,
    h0: Option<&CMatrix>,
) -> Result<Vec<CVector>> {
    let space = sol.space();
    let envs = evolve_branch_seed(sol, branch, seed, grid)?;
    let frame = diag.frame(space);
    let h0 = match h0 {
        Some(h) => {
            ensure_square(h, space.joint_dim())?;
            Some(HermitianPropagator::new(h, "H0")?)
        }
        None => None,
    };
    Ok(grid
        .times()
        .into_iter()
        .zip(envs)
        .map(|(t, env)| {
            let lab = &frame * branch_vector(branch, &sol.x, &env);
            match &h0 {
                Some(p) => p.apply(t, &lab),
                None => lab,
            }
        })
        .collect())
}

/// `Tr_E |Ψ⟩⟨Ψ|`
pub fn reduced_density(state: &CVector, space: FockSpace) -> Result<CMatrix> {
    partial_trace_pure(state, space)
}

/// `ρ` expressed in the observable eigenbasis, `u†ρu`.
pub fn to_observable_frame(rho: &CMatrix, diag: &ObservableDiag) -> CMatrix {
    diag.u.adjoint() * rho * &diag.u
}

/// `(α, c)` of the reduced state `[[α, c], [c*, 1−α]]` in the observable
/// frame, from the evolved environment part of a branch. Multiply `c` by
/// [`jc_frame_phase`] when the commuting JC part is included.
pub fn dephasing_coefficients(env_t: &CVector, branch: Branch, x: &CMatrix) -> (f64, C64) {
    match branch {
        Branch::Psi => {
            let x_psi = x * env_t;
            (env_t.norm_squared(), x_psi.dotc(env_t))
        }
        Branch::Phi => {
            let xd_phi = x.adjoint() * env_t;
            (xd_phi.norm_squared(), -env_t.dotc(&xd_phi))
        }
    }
}

/// Phase `e^{−iνt}` acquired by the coherence under `ν(a†a + σz/2)`.
pub fn jc_frame_phase(nu: f64, t: f64) -> C64 {
    phase(-nu * t)
}

/// `αλ₊ + (1−α)λ₋`
pub fn lambda_expectation(alpha: f64, diag: &ObservableDiag) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(alpha * diag.lambda_plus + (1.0 - alpha) * diag.lambda_minus)
}

/// Closed-form JC coherence `⟨+|ρ(t)|−⟩` of a graph-branch state with
/// seed `ψ` (normalization absorbed), including the commuting part:
/// `e^{−iνt} · conj(Σₙ ξₙ e^{iΩₙt} ⟨ψ|n+1⟩⟨n|ψ⟩)` with
/// `Ωₙ = √(δ²+|g|²(n+2)) − √(δ²+|g|²(n+1))`.
pub fn jc_coherence_series(seed: &CVector, p: JcParams, grid: &TimeGrid) -> Vec<C64> {
    let len = support_len(seed);
    let terms: Vec<(C64, f64)> = (0..len.saturating_sub(1))
        .map(|n| {
            let weight = jc_xi(p, n) * seed[n + 1].conj() * seed[n];
            (weight, jc_root(p, n + 2) - jc_root(p, n + 1))
        })
        .collect();
    grid.times()
        .into_iter()
        .map(|t| {
            let sum: C64 = terms.iter().map(|&(w, omega)| w * phase(omega * t)).sum();
            jc_frame_phase(p.nu, t) * sum.conj()
        })
        .collect()
}

/// `α(t)` and `c(t)` of the graph branch from a biorthonormal system of
/// `K₊`: with `ψ = Σ aₙψₙ`, `aₙ = ⟨φₙ|ψ⟩`,
/// `α(t) = Σₙₘ (aₙe^{−iEₙt})* aₘe^{−iEₘt} ⟨ψₙ|ψₘ⟩` and `c(t)` likewise
/// with `⟨ψₙ|X†|ψₘ⟩`.
pub fn biortho_series(
    seed: &CVector,
    bio: &BiorthoSystem,
    x: &CMatrix,
    grid: &TimeGrid,
) -> Result<(Vec<f64>, Vec<C64>)> {
    let n = bio.len();
    if seed.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: seed.len() });
    }
    let completeness = max_abs(&(&bio.psi * bio.phi.adjoint() - identity(n)));
    if !(completeness < 1e-8) {
        return Err(Error::InvalidArgument("biorthonormal system is not complete"));
    }
    let a = bio.phi.adjoint() * seed;
    let gram = bio.psi.adjoint() * &bio.psi;
    let coh = bio.psi.adjoint() * x.adjoint() * &bio.psi;
    let mut alphas = Vec::with_capacity(grid.steps());
    let mut cs = Vec::with_capacity(grid.steps());
    for t in grid.times() {
        let b = CVector::from_fn(n, |j, _| {
            let e = bio.energies[j];
            // e^{−iEt} for complex E
            a[j] * phase(-e.re * t) * re(libm::exp(e.im * t))
        });
        alphas.push(b.dotc(&(&gram * &b)).re);
        cs.push(b.dotc(&(&coh * &b)));
    }
    Ok((alphas, cs))
}

/// Population of the guard-band levels.
pub fn leakage(state: &CVector, space: FockSpace) -> f64 {
    let dim = space.dim();
    (0..2).flat_map(|q| (space.interior()..dim).map(move |n| q * dim + n)).map(|i| state[i].norm_sqr()).sum()
}

/// Observable-frame reduced quantities along a trajectory.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    /// `⟨Λ(t)⟩ = Tr(Λρ(t))`
    pub lambda_expect: Vec<f64>,
    /// `⟨λ₊|ρ(t)|λ₊⟩`
    pub alpha: Vec<f64>,
    /// `⟨λ₊|ρ(t)|λ₋⟩`
    pub coherence: Vec<C64>,
    /// `|⟨exact|factorized⟩|`, NaN when no factorized trajectory exists.
    pub fidelity: Vec<f64>,
    pub leakage: Vec<f64>,
}

impl TimeSeries {
    /// Reduced quantities of `exact`, compared against `factorized` when given.
    pub fn from_trajectories(
        grid: &TimeGrid,
        exact: &[CVector],
        factorized: Option<&[CVector]>,
        diag: &ObservableDiag,
        space: FockSpace,
    ) -> Result<Self> {
        if exact.len() != grid.steps() {
            return Err(Error::DimensionMismatch { expected: grid.steps(), found: exact.len() });
        }
        if let Some(f) = factorized {
            if f.len() != exact.len() {
                return Err(Error::DimensionMismatch { expected: exact.len(), found: f.len() });
            }
        }
        let observable = diag.observable();
        let mut ts = TimeSeries { times: grid.times(), ..Default::default() };
        for (j, psi) in exact.iter().enumerate() {
            let rho = reduced_density(psi, space)?;
            let frame = to_observable_frame(&rho, diag);
            ts.lambda_expect.push((&observable * &rho).trace().re);
            ts.alpha.push(frame[(0, 0)].re);
            ts.coherence.push(frame[(0, 1)]);
            ts.fidelity.push(match factorized {
                Some(f) => cabs(psi.dotc(&f[j])).min(1.0),
                None => f64::NAN,
            });
            ts.leakage.push(leakage(psi, space));
        }
        Ok(ts)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservationReport {
    /// `maxⱼ |⟨Λ(tⱼ)⟩ − ⟨Λ(t₀)⟩|`
    pub max_drift: f64,
    /// `maxⱼ |α(tⱼ) − α(t₀)|`
    pub alpha_drift: f64,
    pub leak_max: f64,
    /// Smallest fidelity, NaN when none was recorded.
    pub min_fidelity: f64,
}

pub fn conservation_report(ts: &TimeSeries) -> Result<ConservationReport> {
    if ts.is_empty() {
        return Err(Error::InvalidArgument("empty time series"));
    }
    let drift = |v: &[f64]| v.iter().map(|x| (x - v[0]).abs()).fold(0.0, f64::max);
    let min_fidelity = if ts.fidelity.iter().any(|f| f.is_nan()) {
        f64::NAN
    } else {
        ts.fidelity.iter().copied().fold(f64::INFINITY, f64::min)
    };
    Ok(ConservationReport {
        max_drift: drift(&ts.lambda_expect),
        alpha_drift: drift(&ts.alpha),
        leak_max: ts.leakage.iter().copied().fold(0.0, f64::max),
        min_fidelity,
    })
}
