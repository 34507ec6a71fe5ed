//! Scenario runner for `cqs-core`: JSON scenario files, the simulation
//! pipeline, parameter sweeps and the CSV/JSON output formats.

pub mod config;
pub mod emit;
pub mod error;
pub mod run;
pub mod sweep;

pub use config::{parse_scenario, ScenarioConfig};
pub use error::{exit, CliError};
pub use run::{riccati_check, run_scenario, Report, RunOutput};
