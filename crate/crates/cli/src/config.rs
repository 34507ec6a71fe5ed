//! Scenario files: a strict JSON schema with defaults filled on parse.

use cqs_core::blockform::{diagonalize_observable, ObservableDiag};
use cqs_core::operators::qubit_ops;
use cqs_core::{CMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A complex number written either as a plain real or as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Complex {
    Real(f64),
    Pair([f64; 2]),
}

impl Complex {
    pub fn value(self) -> C64 {
        match self {
            Complex::Real(x) => C64::new(x, 0.0),
            Complex::Pair([a, b]) => C64::new(a, b),
        }
    }

    fn is_finite(self) -> bool {
        let z = self.value();
        z.re.is_finite() && z.im.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "jc")]
    Jc,
    #[serde(rename = "rabi")]
    Rabi,
    #[serde(rename = "custom-blocks")]
    CustomBlocks,
}

/// Environment blocks of a Kamiltonian given directly in the observable frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Blocks {
    pub h_plus: Vec<Vec<Complex>>,
    pub h_minus: Vec<Vec<Complex>>,
    pub v: Vec<Vec<Complex>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// JC detuning `ω − ν/2`; mutually exclusive with `omega`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Blocks>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Observable {
    SigmaX,
    SigmaY,
    SigmaZ,
    Entries([[Complex; 2]; 2]),
}

impl Observable {
    pub fn matrix(&self) -> CMatrix {
        let q = qubit_ops();
        match self {
            Observable::SigmaX => q.x,
            Observable::SigmaY => q.y,
            Observable::SigmaZ => q.z,
            Observable::Entries(e) => CMatrix::from_fn(2, 2, |i, j| e[i][j].value()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Analytic,
    GraphSubspace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coherent {
    pub alpha: Complex,
    /// Highest retained Fock level.
    pub cutoff: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SeedState {
    Fock(usize),
    Coherent(Coherent),
    Amplitudes(Vec<Complex>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Psi,
    Phi,
    ProductControl,
    RabiParity(i8),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Space {
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<usize>,
}

impl Default for Space {
    fn default() -> Self {
        Self { dim: default_dim(), guard: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    /// Times are multiples of `1/|g|`.
    InverseCoupling,
    Absolute,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default)]
    pub t_start: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<TimeUnit>,
}

impl Default for Grid {
    fn default() -> Self {
        Self { t_start: 0.0, t_end: default_t_end(), steps: default_steps(), unit: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Bound on the interior Riccati residual.
    pub residual: f64,
    /// Allowed `1 − fidelity` between the factorized and exact states.
    pub fidelity: f64,
    /// Allowed drift of `⟨Λ⟩` and of the populations.
    pub drift: f64,
    /// Guard-band population above which the run is truncation-limited.
    pub leakage: f64,
    /// Minimum drift a product-state control must show.
    pub control_drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { residual: 1e-8, fidelity: 1e-6, drift: 1e-8, leakage: 1e-8, control_drift: 0.01 }
    }
}

fn default_dim() -> usize {
    64
}

fn default_t_end() -> f64 {
    20.0
}

fn default_steps() -> usize {
    201
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: Model,
    #[serde(default)]
    pub params: Params,
    pub observable: Observable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<Solver>,
    pub seed_state: SeedState,
    #[serde(default = "default_kind")]
    pub state_kind: StateKind,
    #[serde(default)]
    pub space: Space,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_kind() -> StateKind {
    StateKind::Psi
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parse and validate a scenario, filling every defaulted field.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, CliError> {
    let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    cfg.validated()
}

impl ScenarioConfig {
    pub fn guard(&self) -> usize {
        self.space.guard.unwrap_or_else(|| self.space.dim.div_ceil(8))
    }

    pub fn solver(&self) -> Solver {
        self.solver.unwrap_or(match self.model {
            Model::CustomBlocks => Solver::GraphSubspace,
            _ => Solver::Analytic,
        })
    }

    pub fn unit(&self) -> TimeUnit {
        self.grid.unit.unwrap_or(match self.model {
            Model::CustomBlocks => TimeUnit::Absolute,
            _ => TimeUnit::InverseCoupling,
        })
    }

    pub fn nu(&self) -> f64 {
        self.params.nu.unwrap_or(1.0)
    }

    pub fn g(&self) -> C64 {
        self.params.g.map_or(C64::new(0.0, 0.0), Complex::value)
    }

    pub fn k(&self) -> usize {
        self.params.k.unwrap_or(1)
    }

    pub fn observable_diag(&self) -> Result<ObservableDiag, CliError> {
        diagonalize_observable(&self.observable.matrix()).map_err(|e| bad(format!("observable: {e}")))
    }

    /// Check every invariant and fill defaults so that the echoed config is
    /// complete.
    pub fn validated(mut self) -> Result<Self, CliError> {
        self.check_params()?;
        self.check_space()?;
        self.check_observable_and_solver()?;
        self.check_seed()?;
        self.check_grid()?;
        self.check_tolerances()?;
        self.space.guard = Some(self.guard());
        self.solver = Some(self.solver());
        self.grid.unit = Some(self.unit());
        if self.model != Model::CustomBlocks {
            self.params.nu = Some(self.nu());
            if self.model == Model::Rabi {
                self.params.k = Some(self.k());
            }
        }
        Ok(self)
    }

    fn check_params(&self) -> Result<(), CliError> {
        let p = &self.params;
        for (name, v) in [("omega", p.omega), ("delta", p.delta), ("nu", p.nu)] {
            if v.is_some_and(|x| !x.is_finite()) {
                return Err(bad(format!("params.{name} must be finite")));
            }
        }
        if p.g.is_some_and(|g| !g.is_finite()) {
            return Err(bad("params.g must be finite"));
        }
        match self.model {
            Model::Jc => {
                if p.omega.is_some() && p.delta.is_some() {
                    return Err(bad("params: give either omega or delta for jc, not both"));
                }
                if p.k.is_some() || p.blocks.is_some() {
                    return Err(bad("params: k and blocks are not jc parameters"));
                }
            }
            Model::Rabi => {
                if p.delta.is_some() || p.blocks.is_some() {
                    return Err(bad("params: delta and blocks are not rabi parameters"));
                }
                if p.k == Some(0) {
                    return Err(bad("params.k must be at least 1"));
                }
            }
            Model::CustomBlocks => {
                if p.omega.is_some() || p.delta.is_some() || p.nu.is_some() || p.g.is_some() || p.k.is_some() {
                    return Err(bad("params: custom-blocks takes only params.blocks"));
                }
                if p.blocks.is_none() {
                    return Err(bad("params.blocks is required for custom-blocks"));
                }
            }
        }
        Ok(())
    }

    fn check_space(&self) -> Result<(), CliError> {
        let dim = self.space.dim;
        if dim < 2 {
            return Err(bad("space.dim must be at least 2"));
        }
        if self.guard() >= dim {
            return Err(bad(format!("space.guard = {} must be below dim = {dim}", self.guard())));
        }
        if self.model == Model::Rabi && self.k() >= dim {
            return Err(bad(format!("params.k = {} must be below dim = {dim}", self.k())));
        }
        if let Some(b) = &self.params.blocks {
            for (name, m) in [("h_plus", &b.h_plus), ("h_minus", &b.h_minus), ("v", &b.v)] {
                if m.len() != dim || m.iter().any(|row| row.len() != dim) {
                    return Err(bad(format!("params.blocks.{name} must be {dim}x{dim}")));
                }
                if m.iter().flatten().any(|z| !z.is_finite()) {
                    return Err(bad(format!("params.blocks.{name} has non-finite entries")));
                }
            }
        }
        Ok(())
    }

    fn check_observable_and_solver(&self) -> Result<(), CliError> {
        if let Observable::Entries(e) = &self.observable {
            if e.iter().flatten().any(|z| !z.is_finite()) {
                return Err(bad("observable entries must be finite"));
            }
        }
        let diag = self.observable_diag()?;
        if diag.degenerate {
            return Err(bad("observable is proportional to the identity; every state conserves it"));
        }
        let analytic = self.solver() == Solver::Analytic;
        match (self.model, analytic) {
            (Model::Jc, true) if !diag.is_identity_frame(1e-12) => {
                return Err(bad("analytic jc solver needs an observable diagonal in the sigma_z basis"));
            }
            (Model::Rabi, true) if !same_frame(&diag, Observable::SigmaX)? => {
                return Err(bad("analytic rabi solver needs an observable diagonal in the sigma_x basis"));
            }
            (Model::CustomBlocks, true) => {
                return Err(bad("custom-blocks has no analytic solver; use graph_subspace"));
            }
            _ => {}
        }
        if let StateKind::RabiParity(eps) = self.state_kind {
            if eps != 1 && eps != -1 {
                return Err(bad("state_kind.rabi_parity must be 1 or -1"));
            }
            if self.model != Model::Rabi || !analytic {
                return Err(bad("rabi_parity states need the rabi model with the analytic solver"));
            }
        }
        Ok(())
    }

    fn check_seed(&self) -> Result<(), CliError> {
        let dim = self.space.dim;
        let support = match &self.seed_state {
            SeedState::Fock(m) => {
                if *m >= dim {
                    return Err(bad(format!("seed_state.fock = {m} is outside dim = {dim}")));
                }
                m + 1
            }
            SeedState::Coherent(c) => {
                if !c.alpha.is_finite() {
                    return Err(bad("seed_state.coherent.alpha must be finite"));
                }
                c.cutoff + 1
            }
            SeedState::Amplitudes(a) => {
                if a.iter().any(|z| !z.is_finite()) {
                    return Err(bad("seed_state.amplitudes must be finite"));
                }
                match a.iter().rposition(|z| z.value().norm_sqr() > 0.0) {
                    Some(i) => i + 1,
                    None => return Err(bad("seed_state.amplitudes is the zero vector")),
                }
            }
        };
        if 2 * support > dim {
            return Err(bad(format!("space.dim = {dim} must be at least twice the seed support ({support} levels)")));
        }
        Ok(())
    }

    fn check_grid(&self) -> Result<(), CliError> {
        let g = &self.grid;
        if !(g.t_start.is_finite() && g.t_end.is_finite()) || g.t_end <= g.t_start {
            return Err(bad("grid needs finite t_start < t_end"));
        }
        if g.steps < 2 {
            return Err(bad("grid.steps must be at least 2"));
        }
        if self.unit() == TimeUnit::InverseCoupling {
            if self.model == Model::CustomBlocks {
                return Err(bad("grid.unit inverse_coupling needs a model with a coupling g"));
            }
            if self.g().norm_sqr() == 0.0 {
                return Err(bad("grid.unit inverse_coupling needs g != 0"));
            }
        }
        Ok(())
    }

    fn check_tolerances(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        for (name, v) in [
            ("residual", t.residual),
            ("fidelity", t.fidelity),
            ("drift", t.drift),
            ("leakage", t.leakage),
            ("control_drift", t.control_drift),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(format!("tolerances.{name} must be positive")));
            }
        }
        Ok(())
    }

    /// Scale applied to grid times.
    pub fn time_scale(&self) -> f64 {
        match self.unit() {
            TimeUnit::Absolute => 1.0,
            TimeUnit::InverseCoupling => 1.0 / self.g().norm_sqr().sqrt(),
        }
    }
}

fn same_frame(diag: &ObservableDiag, preset: Observable) -> Result<bool, CliError> {
    let reference = diagonalize_observable(&preset.matrix()).map_err(|e| bad(e.to_string()))?;
    let d = &diag.u - &reference.u;
    Ok(d.iter().all(|z| z.norm_sqr().sqrt() <= 1e-12))
}

/// Matrix from rows of complex entries.
pub fn matrix_from_rows(rows: &[Vec<Complex>]) -> CMatrix {
    let n = rows.len();
    CMatrix::from_fn(n, rows.first().map_or(0, Vec::len), |i, j| rows[i][j].value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<ScenarioConfig, CliError> {
        parse_scenario(s)
    }

    fn config_error(s: &str) -> String {
        match parse(s) {
            Err(CliError::Config(m)) => m,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_jc_gets_defaults() {
        let cfg = parse(r#"{"model":"jc","params":{"g":0.3},"observable":"sigma_z","seed_state":{"fock":0}}"#).unwrap();
        assert_eq!(cfg.space.dim, 64);
        assert_eq!(cfg.space.guard, Some(8));
        assert_eq!(cfg.grid.steps, 201);
        assert_eq!((cfg.grid.t_start, cfg.grid.t_end), (0.0, 20.0));
        assert_eq!(cfg.grid.unit, Some(TimeUnit::InverseCoupling));
        assert_eq!(cfg.solver, Some(Solver::Analytic));
        assert_eq!(cfg.state_kind, StateKind::Psi);
        assert_eq!(cfg.params.nu, Some(1.0));
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert!((cfg.time_scale() - 1.0 / 0.3).abs() < 1e-15);
    }

    #[test]
    fn guard_rounds_up() {
        let cfg = parse(
            r#"{"model":"jc","params":{"g":1},"observable":"sigma_z","seed_state":{"fock":0},"space":{"dim":33}}"#,
        )
        .unwrap();
        assert_eq!(cfg.guard(), 5);
    }

    #[test]
    fn echo_round_trips() {
        let cfg = parse(
            r#"{"model":"rabi","params":{"omega":1,"g":[0.1,0.2],"k":2},"observable":"sigma_x",
                "seed_state":{"coherent":{"alpha":[0.5,0.1],"cutoff":10}},"state_kind":{"rabi_parity":-1},
                "space":{"dim":40},"tolerances":{"drift":1e-9}}"#,
        )
        .unwrap();
        assert_eq!(cfg.g(), C64::new(0.1, 0.2));
        assert_eq!(cfg.tolerances.drift, 1e-9);
        assert_eq!(cfg.tolerances.residual, 1e-8);
        let again = parse(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        let base = r#""model":"jc","params":{"g":0.3},"observable":"sigma_z","seed_state":{"fock":0}"#;
        assert!(config_error(&format!("{{{base},\"extra\":1}}")).contains("unknown field"));
        let nested = r#"{"model":"jc","params":{"g":0.3,"gamma":1},"observable":"sigma_z","seed_state":{"fock":0}}"#;
        assert!(config_error(nested).contains("unknown field"));
        let grid = format!("{{{base},\"grid\":{{\"steps\":5,\"dt\":0.1}}}}");
        assert!(config_error(&grid).contains("unknown field"));
    }

    #[test]
    fn non_hermitian_observable_rejected() {
        let s = r#"{"model":"jc","params":{"g":0.3},"observable":{"entries":[[1,2],[0,-1]]},
                    "solver":"graph_subspace","seed_state":{"fock":0}}"#;
        assert!(config_error(s).contains("Hermitian"));
    }

    #[test]
    fn explicit_hermitian_observable_accepted() {
        let s = r#"{"model":"jc","params":{"g":0.3},"observable":{"entries":[[2,0],[0,-1]]},"seed_state":{"fock":0}}"#;
        assert!(parse(s).is_ok());
    }

    #[test]
    fn range_errors() {
        let rabi_k = r#"{"model":"rabi","params":{"g":0.2,"k":8},"observable":"sigma_x","seed_state":{"fock":0},"space":{"dim":8}}"#;
        assert!(config_error(rabi_k).contains("k = 8"));
        let support =
            r#"{"model":"jc","params":{"g":0.3},"observable":"sigma_z","seed_state":{"fock":20},"space":{"dim":32}}"#;
        assert!(config_error(support).contains("twice the seed support"));
        let guard = r#"{"model":"jc","params":{"g":0.3},"observable":"sigma_z","seed_state":{"fock":0},"space":{"dim":4,"guard":4}}"#;
        assert!(config_error(guard).contains("guard"));
        let grid =
            r#"{"model":"jc","params":{"g":0.3},"observable":"sigma_z","seed_state":{"fock":0},"grid":{"t_end":-1}}"#;
        assert!(config_error(grid).contains("t_start < t_end"));
        let zero_g = r#"{"model":"jc","observable":"sigma_z","seed_state":{"fock":0}}"#;
        assert!(config_error(zero_g).contains("g != 0"));
        let tol = r#"{"model":"jc","params":{"g":1},"observable":"sigma_z","seed_state":{"fock":0},"tolerances":{"drift":0}}"#;
        assert!(config_error(tol).contains("tolerances.drift"));
        let amps = r#"{"model":"jc","params":{"g":1},"observable":"sigma_z","seed_state":{"amplitudes":[0,0]}}"#;
        assert!(config_error(amps).contains("zero vector"));
    }

    #[test]
    fn model_parameter_mismatches() {
        let both =
            r#"{"model":"jc","params":{"g":1,"omega":1,"delta":0},"observable":"sigma_z","seed_state":{"fock":0}}"#;
        assert!(config_error(both).contains("either omega or delta"));
        let parity = r#"{"model":"jc","params":{"g":1},"observable":"sigma_z","seed_state":{"fock":0},"state_kind":{"rabi_parity":1}}"#;
        assert!(config_error(parity).contains("rabi_parity"));
        let eps = r#"{"model":"rabi","params":{"g":1},"observable":"sigma_x","seed_state":{"fock":0},"state_kind":{"rabi_parity":2}}"#;
        assert!(config_error(eps).contains("1 or -1"));
        let frame = r#"{"model":"jc","params":{"g":1},"observable":"sigma_x","seed_state":{"fock":0}}"#;
        assert!(config_error(frame).contains("sigma_z basis"));
        let custom = r#"{"model":"custom-blocks","observable":"sigma_z","seed_state":{"fock":0}}"#;
        assert!(config_error(custom).contains("params.blocks"));
        let degenerate =
            r#"{"model":"jc","params":{"g":1},"observable":{"entries":[[1,0],[0,1]]},"seed_state":{"fock":0}}"#;
        assert!(config_error(degenerate).contains("identity"));
    }

    #[test]
    fn custom_blocks_shape_checked() {
        let s = r#"{"model":"custom-blocks","params":{"blocks":{"h_plus":[[1,0],[0,2]],"h_minus":[[0,0],[0,0]],"v":[[0.1]]}},
                    "observable":"sigma_z","seed_state":{"fock":0},"space":{"dim":2,"guard":1}}"#;
        assert!(config_error(s).contains("params.blocks.v"));
    }
}
