//! Scenario pipeline: model, Riccati solution, initial state, both
//! propagators, reduced series and verdicts.

use cqs_core::blockform::{
    block_decompose, from_kamiltonian, jc_blocks, jc_model, rabi_model, to_kamiltonian, BlockHamiltonian, JcParams,
    ObservableDiag, RabiParams,
};
use cqs_core::dynamics::{
    conservation_report, jc_coherence_series, propagate_exact, propagate_factorized, ConservationReport, TimeGrid,
    TimeSeries,
};
use cqs_core::operators::{coherent_state, fock_state};
use cqs_core::riccati::{
    metric_floor, pseudo_hermiticity_check, similarity_defect, solve_graph_subspace, solve_jc_analytic,
    solve_rabi_analytic, RiccatiSolution, SolverMethod,
};
use cqs_core::states::{dephasing_state, orthogonal_state, product_state, rabi_parity_state, DephasingState};
use cqs_core::{CMatrix, CVector, FockSpace, C64};
use serde::Serialize;

use crate::config::{matrix_from_rows, Model, ScenarioConfig, SeedState, Solver, StateKind};
use crate::error::CliError;

/// Everything the scenario needs before any state is built.
pub struct Setup {
    pub space: FockSpace,
    pub diag: ObservableDiag,
    pub h_total: CMatrix,
    /// Part of `h_total` commuting with everything else (JC in the σz frame).
    pub h0: Option<CMatrix>,
    pub sol: RiccatiSolution,
}

fn jc_params(cfg: &ScenarioConfig) -> JcParams {
    match (cfg.params.omega, cfg.params.delta) {
        (Some(omega), _) => JcParams::new(omega, cfg.nu(), cfg.g()),
        (None, delta) => JcParams::from_detuning(delta.unwrap_or(0.0), cfg.nu(), cfg.g()),
    }
}

fn rabi_params(cfg: &ScenarioConfig) -> RabiParams {
    RabiParams { omega: cfg.params.omega.unwrap_or(1.0), nu: cfg.nu(), g: cfg.g(), k: cfg.k() }
}

fn rotated_blocks(h: &CMatrix, diag: &ObservableDiag, space: FockSpace) -> Result<BlockHamiltonian, CliError> {
    let k = to_kamiltonian(h, diag, space).map_err(CliError::core("blockform"))?;
    block_decompose(&k, space).map_err(CliError::core("blockform"))
}

fn solve(blocks: &BlockHamiltonian) -> Result<RiccatiSolution, CliError> {
    solve_graph_subspace(blocks).map_err(CliError::core("riccati"))
}

/// Build the Hamiltonian and solve the Riccati equation.
pub fn setup(cfg: &ScenarioConfig) -> Result<Setup, CliError> {
    let space = FockSpace::new(cfg.space.dim, cfg.guard()).map_err(CliError::core("operators"))?;
    let diag = cfg.observable_diag()?;
    let analytic = cfg.solver() == Solver::Analytic;
    let (h_total, h0, sol) = match cfg.model {
        Model::Jc => {
            let p = jc_params(cfg);
            let model = jc_model(p, space);
            if diag.is_identity_frame(1e-12) {
                // Split off ν(a†a + σz/2), which commutes with the rest.
                let sol = if analytic { solve_jc_analytic(p, space) } else { solve(&jc_blocks(p, space))? };
                (model.h_total, Some(model.h0), sol)
            } else {
                let sol = solve(&rotated_blocks(&model.h_total, &diag, space)?)?;
                (model.h_total, None, sol)
            }
        }
        Model::Rabi => {
            let p = rabi_params(cfg);
            let h = rabi_model(p, space).map_err(CliError::core("blockform"))?;
            let sol = if analytic {
                solve_rabi_analytic(p, space).map_err(CliError::core("riccati"))?
            } else {
                solve(&rotated_blocks(&h, &diag, space)?)?
            };
            (h, None, sol)
        }
        Model::CustomBlocks => {
            let b = cfg.params.blocks.as_ref().ok_or_else(|| CliError::Config("params.blocks missing".into()))?;
            let blocks = BlockHamiltonian::new(
                matrix_from_rows(&b.h_plus),
                matrix_from_rows(&b.h_minus),
                matrix_from_rows(&b.v),
                space,
            )
            .map_err(|e| CliError::Config(format!("params.blocks: {e}")))?;
            let h = from_kamiltonian(&blocks.assemble(), &diag, space).map_err(CliError::core("blockform"))?;
            (h, None, solve(&blocks)?)
        }
    };
    Ok(Setup { space, diag, h_total, h0, sol })
}

pub fn seed_vector(cfg: &ScenarioConfig, space: FockSpace) -> Result<CVector, CliError> {
    let v = match &cfg.seed_state {
        SeedState::Fock(m) => fock_state(space, *m),
        SeedState::Coherent(c) => coherent_state(space, c.alpha.value(), c.cutoff),
        SeedState::Amplitudes(a) => {
            let mut v = CVector::zeros(space.dim());
            for (i, z) in a.iter().enumerate().take(space.dim()) {
                v[i] = z.value();
            }
            Ok(v)
        }
    };
    v.map_err(|e| CliError::Config(format!("seed_state: {e}")))
}

pub fn initial_state(cfg: &ScenarioConfig, s: &Setup, seed: &CVector) -> Result<DephasingState, CliError> {
    let tag = CliError::core("states");
    match cfg.state_kind {
        StateKind::Psi => dephasing_state(&s.sol, &s.diag, seed).map_err(tag),
        StateKind::Phi => orthogonal_state(&s.sol, &s.diag, seed).map_err(tag),
        StateKind::RabiParity(eps) => rabi_parity_state(&s.sol.x, seed, eps).map_err(tag),
        StateKind::ProductControl => product_state(&s.diag.ket_plus(), seed).map_err(tag),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Not gated: guard-band leakage exceeds its tolerance.
    TruncationLimited,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    /// `"<"` or `">"`: how `value` must compare with `tolerance`.
    pub relation: &'static str,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl Check {
    fn below(name: &'static str, value: f64, tolerance: f64) -> Self {
        let verdict = if value < tolerance { Verdict::Pass } else { Verdict::Fail };
        Self { name, value, relation: "<", tolerance, verdict }
    }

    fn above(name: &'static str, value: f64, tolerance: f64) -> Self {
        let verdict = if value > tolerance { Verdict::Pass } else { Verdict::Fail };
        Self { name, value, relation: ">", tolerance, verdict }
    }

    fn gated(mut self, truncation_limited: bool) -> Self {
        if truncation_limited && self.verdict == Verdict::Fail {
            self.verdict = Verdict::TruncationLimited;
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiccatiSummary {
    pub method: &'static str,
    pub residual_norm: f64,
    pub interior_residual_norm: f64,
    pub pseudo_hermiticity_defect: f64,
    pub similarity_defect: f64,
    pub k_plus_hermiticity_defect: f64,
    pub k_minus_hermiticity_defect: f64,
    pub eta_floor: f64,
    pub xi_floor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

fn hermiticity_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm_sqr().sqrt()).fold(0.0, f64::max)
}

pub fn riccati_summary(sol: &RiccatiSolution) -> Result<RiccatiSummary, CliError> {
    Ok(RiccatiSummary {
        method: match sol.method {
            SolverMethod::JcAnalytic => "jc_analytic",
            SolverMethod::RabiAnalytic => "rabi_analytic",
            SolverMethod::GraphSubspace => "graph_subspace",
        },
        residual_norm: sol.residual_norm,
        interior_residual_norm: sol.interior_residual_norm,
        pseudo_hermiticity_defect: pseudo_hermiticity_check(sol),
        similarity_defect: similarity_defect(sol).map_err(CliError::core("riccati"))?,
        k_plus_hermiticity_defect: hermiticity_defect(&sol.k_plus),
        k_minus_hermiticity_defect: hermiticity_defect(&sol.k_minus),
        eta_floor: metric_floor(&sol.eta),
        xi_floor: metric_floor(&sol.xi),
        note: sol.note,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conservation {
    pub max_drift: f64,
    pub alpha_drift: f64,
    pub leak_max: f64,
    /// Absent when the state has no factorized evolution.
    pub min_fidelity: Option<f64>,
    pub truncation_limited: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub config: ScenarioConfig,
    pub riccati: RiccatiSummary,
    pub conservation: Conservation,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub struct RunOutput {
    pub series: TimeSeries,
    pub report: Report,
}

/// Run one scenario end to end.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let s = setup(cfg)?;
    let seed = seed_vector(cfg, s.space)?;
    let state = initial_state(cfg, &s, &seed)?;
    let scale = cfg.time_scale();
    let grid = TimeGrid::new(cfg.grid.t_start * scale, cfg.grid.t_end * scale, cfg.grid.steps)
        .map_err(|e| CliError::Config(format!("grid: {e}")))?;

    let exact = propagate_exact(&s.h_total, &state.vec, &grid).map_err(CliError::core("dynamics"))?;
    let factorized = match state.branch() {
        Some((branch, bseed)) => Some(
            propagate_factorized(&s.sol, &s.diag, branch, &bseed, &grid, s.h0.as_ref())
                .map_err(CliError::core("dynamics"))?,
        ),
        None => None,
    };
    let series = TimeSeries::from_trajectories(&grid, &exact, factorized.as_deref(), &s.diag, s.space)
        .map_err(CliError::core("dynamics"))?;
    let rep: ConservationReport = conservation_report(&series).map_err(CliError::core("dynamics"))?;

    let tol = &cfg.tolerances;
    let truncation_limited = rep.leak_max >= tol.leakage;
    let mut checks = Vec::new();
    if cfg.state_kind == StateKind::ProductControl {
        checks.push(Check::above("control_drift", rep.max_drift, tol.control_drift));
    } else {
        checks.push(Check::below("riccati_residual", s.sol.interior_residual_norm, tol.residual));
        checks.push(Check::below("lambda_drift", rep.max_drift, tol.drift));
        checks.push(Check::below("population_drift", rep.alpha_drift, tol.drift));
        if factorized.is_some() {
            checks.push(Check::below("infidelity", 1.0 - rep.min_fidelity, tol.fidelity).gated(truncation_limited));
        }
        let jc_series = cfg.model == Model::Jc && cfg.state_kind == StateKind::Psi && s.h0.is_some();
        if jc_series {
            if let Some((_, bseed)) = state.branch() {
                let deviation = coherence_series_deviation(cfg, &bseed, &grid, &series.coherence);
                checks.push(Check::below("coherence_series", deviation, tol.fidelity).gated(truncation_limited));
            }
        }
    }
    let passed = checks.iter().all(|c| c.verdict != Verdict::Fail);
    let report = Report {
        config: cfg.clone(),
        riccati: riccati_summary(&s.sol)?,
        conservation: Conservation {
            max_drift: rep.max_drift,
            alpha_drift: rep.alpha_drift,
            leak_max: rep.leak_max,
            min_fidelity: factorized.as_ref().map(|_| rep.min_fidelity),
            truncation_limited,
        },
        checks,
        passed,
    };
    Ok(RunOutput { series, report })
}

fn coherence_series_deviation(cfg: &ScenarioConfig, seed: &CVector, grid: &TimeGrid, oracle: &[C64]) -> f64 {
    jc_coherence_series(seed, jc_params(cfg), grid)
        .iter()
        .zip(oracle)
        .map(|(a, b)| (a - b).norm_sqr().sqrt())
        .fold(0.0, f64::max)
}

/// Solver diagnostics only, for `riccati-check`.
pub fn riccati_check(cfg: &ScenarioConfig) -> Result<(RiccatiSummary, Check), CliError> {
    let s = setup(cfg)?;
    let summary = riccati_summary(&s.sol)?;
    let check = Check::below("riccati_residual", summary.interior_residual_norm, cfg.tolerances.residual);
    Ok((summary, check))
}
