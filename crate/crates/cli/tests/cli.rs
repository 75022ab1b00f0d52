use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pathquant_cli::{Config, Experiment, REGISTRY};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pathquant"));
    c.env_remove("PATHQUANT_OUT_DIR");
    c
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const CHEAP: &str = r#"{"schema_version": 1, "seed": 9, "experiments": [
    {"name": "riemann-convergence", "levels": 3, "final_tolerance": 0.02},
    {"name": "stokes-pair"},
    {"name": "smooth-path-null", "n_steps": 64, "tolerance": 1.0},
    {"name": "second-order", "n_paths": 200, "min_exponent": 2, "max_exponent": 5, "tolerance": 0.01}
]}"#;

fn csv_files(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for d in fs::read_dir(root).unwrap() {
        let d = d.unwrap().path();
        if d.is_dir() {
            for f in fs::read_dir(&d).unwrap() {
                let f = f.unwrap().path();
                if f.extension().is_some_and(|e| e == "csv") {
                    out.push((f.strip_prefix(root).unwrap().display().to_string(), fs::read(&f).unwrap()));
                }
            }
        }
    }
    out.sort();
    out
}

#[test]
fn list_names_registry() {
    let o = run(bin().arg("list"));
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["inner-product-lemma", "ito-stratonovich", "stokes-pair"] {
        assert!(text.contains(name), "{text}");
    }
    assert_eq!(text.lines().count(), REGISTRY.len());
}

#[test]
fn schema_lists_defaults_that_parse_back() {
    let o = run(bin().arg("schema"));
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    for (name, _) in REGISTRY {
        let mut d = v["experiments"][name]["defaults"].clone();
        d["name"] = serde_json::Value::String((*name).into());
        let e: Experiment = serde_json::from_value(d).unwrap();
        assert_eq!(e.name(), *name);
        assert!(e.validate().is_ok());
    }
    assert_eq!(Experiment::defaults().len(), REGISTRY.len());
}

#[test]
fn empty_experiment_list_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), r#"{"schema_version": 1, "seed": 1, "experiments": []}"#);
    let o = run(bin().arg("run").arg(&cfg).arg("--out").arg(&out));
    assert_eq!(code(&o), 0);
    assert!(!out.exists());
}

#[test]
fn negative_norm_writes_negative_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        r#"{"schema_version": 1, "seed": 1, "experiments": [{"name": "negative-norm", "n": 24, "hbar": 1.0}]}"#,
    );
    let o = run(bin().arg("run").arg(&cfg).arg("--out").arg(&out));
    assert_eq!(code(&o), 0);
    let mut r = csv::Reader::from_path(out.join("00-negative-norm/witness.csv")).unwrap();
    let headers = r.headers().unwrap().clone();
    let row = r.records().next().unwrap().unwrap();
    let col = headers.iter().position(|h| h == "min_eigenvalue").unwrap();
    assert!(row[col].parse::<f64>().unwrap() < 0.0);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("00-negative-norm/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["tolerances"]["witness_tolerance"], 1e-3);
}

#[test]
fn coarse_grid_fails_check_with_tolerance_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema_version": 1, "seed": 1, "experiments": [{"name": "weyl-agreement", "n": 8}]}"#,
    );
    let out = dir.path().join("out");
    let o = run(bin().arg("run").arg(&cfg).arg("--check").arg("--out").arg(&out));
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], false);
    assert!(summary["experiments"][0]["error"].as_str().unwrap().contains("coarse"));
    // without --check the failure is recorded but the run succeeds
    let o = run(bin().arg("run").arg(&cfg).arg("--out").arg(&out));
    assert_eq!(code(&o), 0);
}

#[test]
fn validation_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cases = [
        r#"{"schema_version": 1, "seed": 1, "experiments": [{"name": "no-such-experiment"}]}"#,
        r#"{"schema_version": 1, "seed": 1, "experiments": [{"name": "negative-norm", "nn": 24}]}"#,
        r#"{"schema_version": 1, "seed": 1, "colour": "red"}"#,
        r#"{"schema_version": 2, "seed": 1}"#,
        r#"{"schema_version": 1, "seed": 1, "experiments": [{"name": "negative-norm", "n": 4}]}"#,
        r#"{"schema_version": 1, "seed": 1, "experiments": [{"name": "negative-norm", "hbar": -1.0}]}"#,
        r#"{"schema_version": 1, "seed": 1, "experiments": [{"name": "ito-stratonovich", "max_exponent": 30}]}"#,
        r#"{"schema_version": 1, "seed": -3}"#,
        r#"{"schema_version": 1, "seed": 1, "experiments": ["#,
    ];
    for body in cases {
        let cfg = write_config(dir.path(), body);
        let o = run(bin().arg("run").arg(&cfg).arg("--out").arg(&out));
        assert_eq!(code(&o), 2, "{body}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!out.exists());
    }
    let cfg = write_config(dir.path(), r#"{"schema_version": 1, "seed": 1}"#);
    assert_eq!(code(&run(bin().arg("run").arg(&cfg).arg("--jobs").arg("0"))), 2);
    assert_eq!(code(&run(bin().arg("frobnicate"))), 2);
}

#[test]
fn io_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(bin().arg("run").arg(dir.path().join("missing.json")))), 1);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg =
        write_config(dir.path(), r#"{"schema_version": 1, "seed": 1, "experiments": [{"name": "smooth-path-null"}]}"#);
    let o = run(bin().arg("run").arg(&cfg).arg("--out").arg(blocker.join("sub")));
    assert_eq!(code(&o), 1);
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let from_config = dir.path().join("cfg-out");
    let from_env = dir.path().join("env-out");
    let from_flag = dir.path().join("flag-out");
    let body = format!(
        r#"{{"schema_version": 1, "seed": 1, "output_dir": {:?}, "experiments": [{{"name": "smooth-path-null"}}]}}"#,
        from_config.display().to_string()
    );
    let cfg = write_config(dir.path(), &body);
    assert_eq!(code(&run(bin().arg("run").arg(&cfg))), 0);
    assert!(from_config.join("summary.json").exists());
    assert_eq!(code(&run(bin().arg("run").arg(&cfg).env("PATHQUANT_OUT_DIR", &from_env))), 0);
    assert!(from_env.join("summary.json").exists());
    assert_eq!(
        code(&run(bin().arg("run").arg(&cfg).env("PATHQUANT_OUT_DIR", &from_env).arg("--out").arg(&from_flag))),
        0
    );
    assert!(from_flag.join("summary.json").exists());
}

#[test]
fn outputs_do_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CHEAP);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(code(&run(bin().arg("run").arg(&cfg).arg("--check").arg("--out").arg(&a))), 0);
    assert_eq!(code(&run(bin().arg("run").arg(&cfg).arg("--check").arg("--jobs").arg("3").arg("--out").arg(&b))), 0);
    let (fa, fb) = (csv_files(&a), csv_files(&b));
    assert!(fa.len() >= 5);
    assert_eq!(fa, fb);
    assert_eq!(fs::read(a.join("summary.json")).unwrap(), fs::read(b.join("summary.json")).unwrap());
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(b.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["jobs"], 3);
    assert_eq!(meta["timings"].as_array().unwrap().len(), 4);
}

#[test]
fn every_summary_records_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Config::from_json(CHEAP).unwrap();
    let opts = pathquant_cli::RunOptions { check: true, jobs: 1, out: Some(dir.path().into()) };
    let report = pathquant_cli::run_config(&cfg, &opts).unwrap();
    assert!(report.summary.passed);
    for e in &report.summary.experiments {
        assert!(!e.tolerances.is_empty(), "{}", e.name);
        assert!(!e.metrics.is_empty(), "{}", e.name);
        assert!(dir.path().join(&e.directory).join("summary.json").exists());
    }
}

#[test]
fn csv_dialect() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema_version": 1, "seed": 3, "experiments": [{"name": "second-order", "n_paths": 50, "max_exponent": 4, "tolerance": 1.0}]}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(code(&run(bin().arg("run").arg(&cfg).arg("--out").arg(&out))), 0);
    let text = fs::read_to_string(out.join("00-second-order/welldefined.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n_steps,estimate,l2_error,stderr,estimate_stderr,n_paths,seed"));
    for l in lines {
        let cells: Vec<&str> = l.split(',').collect();
        assert_eq!(cells.len(), 7);
        assert_eq!(cells[6], "3");
        for c in &cells[1..5] {
            assert!(c.parse::<f64>().is_ok(), "{c}");
        }
    }
}
