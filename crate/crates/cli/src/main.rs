use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cqs::emit::{emit, fmt_f64, to_json, write_atomic};
use cqs::run::{Check, Verdict};
use cqs::sweep::{parse_values, sweep, sweep_csv, thread_cap, Axis, Status};
use cqs::{exit, parse_scenario, riccati_check, run_scenario, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "cqs", version, about = "Conserved-observable qubit-environment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write timeseries.csv and report.json.
    Simulate {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a scenario for each value of one parameter and write sweep.csv.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        axis: String,
        #[arg(long)]
        values: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Solve the Riccati equation and print its diagnostics.
    RiccatiCheck { config: PathBuf },
}

fn load(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_scenario(&text)
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        let verdict = match c.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::TruncationLimited => "TRUNCATION-LIMITED",
        };
        println!("{:<20} {:>24} {} {:<10.3e} {verdict}", c.name, fmt_f64(c.value), c.relation, c.tolerance);
    }
}

fn simulate(config: &Path, out: &Path) -> Result<i32, CliError> {
    let cfg = load(config)?;
    let run = run_scenario(&cfg)?;
    emit(&run.series, &run.report, out)?;
    print_checks(&run.report.checks);
    Ok(if run.report.passed { exit::SUCCESS } else { exit::CHECK_FAILED })
}

fn run_sweep(config: &Path, axis: &str, values: &str, out: &Path) -> Result<i32, CliError> {
    let cfg = load(config)?;
    let axis = Axis::parse(axis)?;
    let values = parse_values(values)?;
    let rows = sweep(&cfg, axis, &values, thread_cap()?)?;
    std::fs::create_dir_all(out).map_err(CliError::io(out))?;
    write_atomic(&out.join("sweep.csv"), sweep_csv(&rows).as_bytes())?;
    write_atomic(&out.join("sweep.json"), to_json(&rows).as_bytes())?;
    for r in &rows {
        println!("{:>24} {:?}", fmt_f64(r.value), r.status);
        if let Some(e) = &r.error {
            eprintln!("  {e}");
        }
    }
    let worst = rows
        .iter()
        .map(|r| match r.status {
            Status::Pass => exit::SUCCESS,
            Status::Fail => exit::CHECK_FAILED,
            Status::ConfigError => exit::CONFIG,
            Status::NumericalError => exit::NUMERICAL,
        })
        .max()
        .unwrap_or(exit::SUCCESS);
    Ok(worst)
}

fn check(config: &Path) -> Result<i32, CliError> {
    let cfg = load(config)?;
    let (s, residual) = riccati_check(&cfg)?;
    println!("method                     {}", s.method);
    for (name, v) in [
        ("residual_norm", s.residual_norm),
        ("interior_residual_norm", s.interior_residual_norm),
        ("pseudo_hermiticity", s.pseudo_hermiticity_defect),
        ("similarity_defect", s.similarity_defect),
        ("k_plus_hermiticity", s.k_plus_hermiticity_defect),
        ("k_minus_hermiticity", s.k_minus_hermiticity_defect),
        ("eta_min_eigenvalue", s.eta_floor),
        ("xi_min_eigenvalue", s.xi_floor),
    ] {
        println!("{name:<26} {}", fmt_f64(v));
    }
    if let Some(note) = s.note {
        println!("note                       {note}");
    }
    print_checks(std::slice::from_ref(&residual));
    Ok(if residual.verdict == Verdict::Pass { exit::SUCCESS } else { exit::CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config, out } => simulate(config, out),
        Command::Sweep { config, axis, values, out } => run_sweep(config, axis, values, out),
        Command::RiccatiCheck { config } => check(config),
    };
    let code = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
