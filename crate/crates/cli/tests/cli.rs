use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cqs::emit::{read_csv_rows, timeseries_csv, TIMESERIES_HEADER};
use cqs::sweep::{sweep, Axis, Status, SWEEP_HEADER};
use cqs::{parse_scenario, run_scenario};
use serde_json::Value;

const SMALL_JC: &str = r#"{
  "model": "jc",
  "params": {"delta": 0.4, "nu": 1.0, "g": 0.5},
  "observable": "sigma_z",
  "seed_state": {"coherent": {"alpha": 0.8, "cutoff": 10}},
  "space": {"dim": 32},
  "grid": {"t_end": 5.0, "steps": 41}
}"#;

const FAILING_CONTROL: &str = r#"{
  "model": "jc",
  "params": {"delta": 50.0, "g": 0.3},
  "observable": "sigma_z",
  "seed_state": {"fock": 1},
  "state_kind": "product_control",
  "space": {"dim": 16},
  "grid": {"t_end": 2.0, "steps": 21}
}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cqs"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn simulate(config: &Path, out: &Path) -> Output {
    bin().arg("simulate").arg(config).arg("--out").arg(out).output().unwrap()
}

fn key_paths(v: &Value, prefix: &str, out: &mut Vec<String>) {
    if let Value::Object(map) = v {
        for (k, child) in map {
            let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            out.push(path.clone());
            if k != "config" {
                key_paths(child, &path, out);
            }
        }
    } else if let Value::Array(items) = v {
        if let Some(first) = items.first() {
            key_paths(first, &format!("{prefix}[]"), out);
        }
    }
}

#[test]
fn simulate_writes_outputs_with_exact_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "jc.json", SMALL_JC);
    let out = dir.path().join("out");
    let res = simulate(&cfg_path, &out);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));

    let csv = std::fs::read_to_string(out.join("timeseries.csv")).unwrap();
    let (header, rows) = read_csv_rows(&csv).unwrap();
    assert_eq!(header.join(","), TIMESERIES_HEADER);
    assert_eq!(rows.len(), 41);

    // The file round-trips bit-for-bit against an in-process run.
    let run = run_scenario(&parse_scenario(SMALL_JC).unwrap()).unwrap();
    assert_eq!(csv, timeseries_csv(&run.series));
    for (j, row) in rows.iter().enumerate() {
        assert_eq!(row[0].to_bits(), run.series.times[j].to_bits());
        assert_eq!(row[1].to_bits(), run.series.lambda_expect[j].to_bits());
        assert_eq!(row[3].to_bits(), run.series.coherence[j].re.to_bits());
        assert_eq!(row[4].to_bits(), run.series.coherence[j].im.to_bits());
    }
}

#[test]
fn report_matches_golden_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "jc.json", SMALL_JC);
    let out = dir.path().join("out");
    assert_eq!(simulate(&cfg_path, &out).status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();

    let mut paths = Vec::new();
    key_paths(&report, "", &mut paths);
    paths.sort();
    let golden = include_str!("golden/report_keys.txt");
    let mut expected: Vec<String> = golden.lines().filter(|l| !l.is_empty()).map(String::from).collect();
    expected.sort();
    assert_eq!(paths, expected);

    // The config echo is itself a valid scenario equal to the parsed input.
    let echo = serde_json::to_string(&report["config"]).unwrap();
    assert_eq!(parse_scenario(&echo).unwrap(), parse_scenario(SMALL_JC).unwrap());
    assert_eq!(report["passed"], Value::Bool(true));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "jc.json", SMALL_JC);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(simulate(&cfg_path, &a).status.code(), Some(0));
    assert_eq!(simulate(&cfg_path, &b).status.code(), Some(0));
    for f in ["timeseries.csv", "report.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");

    let failing = write_config(dir.path(), "fail.json", FAILING_CONTROL);
    assert_eq!(simulate(&failing, &out).status.code(), Some(1));

    let malformed = write_config(dir.path(), "bad.json", "{\"model\": \"jc\",");
    let res = simulate(&malformed, &out);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("error"));

    let unknown = write_config(dir.path(), "unknown.json", &SMALL_JC.replacen('{', "{\"colour\": 1,", 1));
    assert_eq!(simulate(&unknown, &out).status.code(), Some(2));

    let missing = dir.path().join("nope.json");
    assert_eq!(simulate(&missing, &out).status.code(), Some(2));
}

#[test]
fn riccati_check_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "jc.json", SMALL_JC);
    let res = bin().arg("riccati-check").arg(&cfg_path).output().unwrap();
    assert_eq!(res.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("riccati_residual"), "{stdout}");
    assert!(stdout.contains("PASS"));
}

#[test]
fn sweep_rows_sorted_and_conserving() {
    let cfg = parse_scenario(SMALL_JC).unwrap();
    let rows = sweep(&cfg, Axis::G, &[0.9, 0.2, 0.5], Some(2)).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().map(|r| r.value).collect::<Vec<_>>(), vec![0.2, 0.5, 0.9]);
    for r in &rows {
        assert_eq!(r.status, Status::Pass);
        assert!(r.max_drift < 1e-8, "g = {}: drift {}", r.value, r.max_drift);
    }
}

#[test]
fn sweep_cli_thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "jc.json", SMALL_JC);
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("t{threads}"));
        let res = bin()
            .env("CQS_THREADS", threads)
            .args(["sweep"])
            .arg(&cfg_path)
            .args(["--axis", "delta", "--values", "0.5,-0.3,0.0", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
        outputs.push(std::fs::read_to_string(out.join("sweep.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let lines: Vec<&str> = outputs[0].lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER);
    assert_eq!(lines.len(), 4);
}

#[test]
fn sweep_cli_rejects_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "jc.json", SMALL_JC);
    let run = |extra: &[&str], threads: Option<&str>| {
        let mut cmd = bin();
        cmd.arg("sweep").arg(&cfg_path).args(extra).arg("--out").arg(dir.path().join("o"));
        if let Some(t) = threads {
            cmd.env("CQS_THREADS", t);
        }
        cmd.output().unwrap().status.code()
    };
    assert_eq!(run(&["--axis", "g", "--values", ""], None), Some(2));
    assert_eq!(run(&["--axis", "g", "--values", "0.1,x"], None), Some(2));
    assert_eq!(run(&["--axis", "k", "--values", "1"], None), Some(2));
    assert_eq!(run(&["--axis", "temperature", "--values", "1"], None), Some(2));
    assert_eq!(run(&["--axis", "g", "--values", "0.1"], Some("zero")), Some(2));
}

#[test]
fn shipped_scenarios_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let text = std::fs::read_to_string(&path).unwrap();
            parse_scenario(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            count += 1;
        }
    }
    assert!(count >= 4);
}
