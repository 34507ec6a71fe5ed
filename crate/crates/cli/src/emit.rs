//! Output files. Every file is written to a temporary sibling and renamed
//! into place, so readers never observe a partial file.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use cqs_core::TimeSeries;
use serde::Serialize;

use crate::error::CliError;

pub const TIMESERIES_HEADER: &str = "t,lambda_expect,alpha,c_re,c_im,fidelity,leakage";
pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const REPORT_FILE: &str = "report.json";

/// Write `contents` to `path` atomically.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::io(dir))?;
    tmp.write_all(contents).map_err(CliError::io(tmp.path()))?;
    tmp.as_file().sync_all().map_err(CliError::io(tmp.path()))?;
    tmp.persist(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

/// One value with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn timeseries_csv(ts: &TimeSeries) -> String {
    let mut out = String::with_capacity(ts.len() * 170);
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for j in 0..ts.len() {
        let row = [
            ts.times[j],
            ts.lambda_expect[j],
            ts.alpha[j],
            ts.coherence[j].re,
            ts.coherence[j].im,
            ts.fidelity[j],
            ts.leakage[j],
        ];
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    s.push('\n');
    s
}

/// Write `timeseries.csv` and `report.json` into `out_dir`, creating it if needed.
pub fn emit<R: Serialize>(ts: &TimeSeries, report: &R, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir).map_err(CliError::io(out_dir))?;
    let csv = out_dir.join(TIMESERIES_FILE);
    write_atomic(&csv, timeseries_csv(ts).as_bytes())?;
    let json = out_dir.join(REPORT_FILE);
    write_atomic(&json, to_json(report).as_bytes())?;
    Ok(vec![csv, json])
}

/// Parse a `timeseries.csv` back into rows of numbers.
pub fn read_csv_rows(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().ok_or("empty file")?.split(',').map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        let row = row.map_err(|e| format!("line {}: {e}", i + 2))?;
        if row.len() != header.len() {
            return Err(format!("line {}: expected {} fields, found {}", i + 2, header.len(), row.len()));
        }
        rows.push(row);
    }
    Ok((header, rows))
}
