//! Independent runs over one scalar parameter.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Complex, Model, ScenarioConfig};
use crate::emit::fmt_f64;
use crate::error::CliError;
use crate::run::run_scenario;

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "CQS_THREADS";

pub const SWEEP_HEADER: &str = "value,status,interior_residual,max_drift,alpha_drift,min_fidelity,leak_max";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Omega,
    Delta,
    Nu,
    G,
    K,
}

impl Axis {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "omega" => Ok(Axis::Omega),
            "delta" => Ok(Axis::Delta),
            "nu" => Ok(Axis::Nu),
            "g" => Ok(Axis::G),
            "k" => Ok(Axis::K),
            other => Err(CliError::Config(format!(
                "sweep axis {other:?} is not a scalar parameter (expected omega, delta, nu, g or k)"
            ))),
        }
    }

    pub fn applies_to(self, model: Model) -> bool {
        !matches!((self, model), (_, Model::CustomBlocks) | (Axis::Delta, Model::Rabi) | (Axis::K, Model::Jc))
    }

    fn check(self, model: Model) -> Result<(), CliError> {
        if self.applies_to(model) {
            Ok(())
        } else {
            Err(CliError::Config(format!("sweep axis {self:?} does not apply to model {model:?}")))
        }
    }

    /// Copy of `cfg` with this parameter set to `value`, revalidated.
    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig, CliError> {
        self.check(cfg.model)?;
        let mut c = cfg.clone();
        let p = &mut c.params;
        match self {
            Axis::Omega => {
                p.omega = Some(value);
                p.delta = None;
            }
            Axis::Delta => {
                p.delta = Some(value);
                p.omega = None;
            }
            Axis::Nu => p.nu = Some(value),
            Axis::G => p.g = Some(Complex::Real(value)),
            Axis::K => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(CliError::Config(format!("sweep value {value} is not a valid photon number")));
                }
                p.k = Some(value as usize);
            }
        }
        c.validated()
    }
}

pub fn parse_values(list: &str) -> Result<Vec<f64>, CliError> {
    let values: Result<Vec<f64>, _> =
        list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse::<f64>).collect();
    let values = values.map_err(|e| CliError::Config(format!("sweep values: {e}")))?;
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config("sweep values must be finite".into()));
    }
    Ok(values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    ConfigError,
    NumericalError,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::ConfigError => "config_error",
            Status::NumericalError => "numerical_error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub status: Status,
    pub interior_residual: f64,
    pub max_drift: f64,
    pub alpha_drift: f64,
    pub min_fidelity: f64,
    pub leak_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn run_one(cfg: &ScenarioConfig, axis: Axis, value: f64) -> SweepRow {
    let result = axis.apply(cfg, value).and_then(|c| run_scenario(&c));
    match result {
        Ok(out) => {
            let r = &out.report;
            SweepRow {
                value,
                status: if r.passed { Status::Pass } else { Status::Fail },
                interior_residual: r.riccati.interior_residual_norm,
                max_drift: r.conservation.max_drift,
                alpha_drift: r.conservation.alpha_drift,
                min_fidelity: r.conservation.min_fidelity.unwrap_or(f64::NAN),
                leak_max: r.conservation.leak_max,
                error: None,
            }
        }
        Err(e) => SweepRow {
            value,
            status: if e.exit_code() == crate::error::exit::NUMERICAL {
                Status::NumericalError
            } else {
                Status::ConfigError
            },
            interior_residual: f64::NAN,
            max_drift: f64::NAN,
            alpha_drift: f64::NAN,
            min_fidelity: f64::NAN,
            leak_max: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}

/// Thread cap from the environment, if set.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
        Err(_) => Ok(None),
    }
}

/// Run every value (in parallel, at most `threads` at once) and return the
/// rows sorted by value.
pub fn sweep(
    cfg: &ScenarioConfig,
    axis: Axis,
    values: &[f64],
    threads: Option<usize>,
) -> Result<Vec<SweepRow>, CliError> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    axis.check(cfg.model)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.min(values.len()));
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let mut rows: Vec<SweepRow> = pool.install(|| values.par_iter().map(|&v| run_one(cfg, axis, v)).collect());
    rows.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let nums = [r.interior_residual, r.max_drift, r.alpha_drift, r.min_fidelity, r.leak_max];
        let cells: Vec<String> = nums.iter().map(|&x| fmt_f64(x)).collect();
        let _ = writeln!(out, "{},{},{}", fmt_f64(r.value), r.status.as_str(), cells.join(","));
    }
    out
}
