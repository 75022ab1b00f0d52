//! Experiment driver. A JSON config names experiments from the registry;
//! each one writes CSV tables and a JSON summary into its own directory.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid config or arguments,
//! 3 tolerance failure under `--check`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

pub use config::{Config, OUT_DIR_ENV, SCHEMA_VERSION};
pub use error::CliError;
pub use experiments::{Experiment, Outcome, REGISTRY};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pathquant", version, about = "Run path-integral quantization experiments from a JSON config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiments listed in a config file.
    Run {
        config: PathBuf,
        /// Exit with status 3 if any experiment misses its tolerances.
        #[arg(long)]
        check: bool,
        /// Number of experiments run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output directory; overrides the environment and the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the experiment registry.
    List,
    /// Print the config schema with default parameters.
    Schema,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub check: bool,
    pub jobs: usize,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub index: usize,
    pub name: &'static str,
    pub directory: String,
    pub parameters: Experiment,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub metrics: BTreeMap<String, f64>,
    pub tables: Vec<String>,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub seed: u64,
    pub passed: bool,
    pub experiments: Vec<ExperimentSummary>,
}

#[derive(Debug, Clone, Serialize)]
struct Timing {
    index: usize,
    name: &'static str,
    seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
struct Metadata {
    tool_version: &'static str,
    started_unix_seconds: f64,
    finished_unix_seconds: f64,
    jobs: usize,
    check: bool,
    timings: Vec<Timing>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: RunSummary,
    pub output_dir: Option<PathBuf>,
    pub seconds: Vec<f64>,
}

impl RunReport {
    pub fn exit_code(&self, check: bool) -> i32 {
        if check && !self.summary.passed {
            EXIT_TOLERANCE
        } else {
            EXIT_OK
        }
    }
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

fn run_one(index: usize, e: &Experiment, seed: u64, root: &Path) -> Result<(ExperimentSummary, f64), CliError> {
    let dir_name = format!("{index:02}-{}", e.name());
    let dir = root.join(&dir_name);
    output::create_dir(&dir)?;
    let t0 = Instant::now();
    let result = e.run(seed);
    let seconds = t0.elapsed().as_secs_f64();
    let (outcome, error) = match result {
        Ok(o) => (o, None),
        Err(f) => (Outcome::default(), Some(f.0)),
    };
    let tables = outcome.tables.iter().map(|t| output::write_table(&dir, t)).collect::<Result<Vec<_>, _>>()?;
    let summary = ExperimentSummary {
        index,
        name: e.name(),
        directory: dir_name,
        parameters: e.clone(),
        tolerances: outcome.tolerances,
        metrics: outcome.metrics,
        tables,
        passed: error.is_none() && outcome.passed,
        error,
    };
    output::write_json(&dir.join("summary.json"), &summary)?;
    Ok((summary, seconds))
}

/// Runs every experiment of a validated config. With no experiments nothing
/// is written.
pub fn run_config(cfg: &Config, opts: &RunOptions) -> Result<RunReport, CliError> {
    cfg.validate()?;
    if opts.jobs == 0 {
        return Err(CliError::Jobs);
    }
    let mut summary =
        RunSummary { schema_version: cfg.schema_version, seed: cfg.seed, passed: true, experiments: vec![] };
    if cfg.experiments.is_empty() {
        return Ok(RunReport { summary, output_dir: None, seconds: vec![] });
    }
    let root = cfg.resolve_output_dir(opts.out.as_deref());
    output::create_dir(&root)?;
    let started = unix_now();
    let indexed: Vec<(usize, &Experiment)> = cfg.experiments.iter().enumerate().collect();
    let results: Vec<(ExperimentSummary, f64)> = if opts.jobs == 1 {
        indexed.iter().map(|&(i, e)| run_one(i, e, cfg.seed, &root)).collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| CliError::Write { path: root.clone(), source: std::io::Error::other(e) })?;
        pool.install(|| indexed.par_iter().map(|&(i, e)| run_one(i, e, cfg.seed, &root)).collect::<Result<_, _>>())?
    };
    let seconds: Vec<f64> = results.iter().map(|r| r.1).collect();
    let timings = results.iter().map(|(s, t)| Timing { index: s.index, name: s.name, seconds: *t }).collect();
    summary.experiments = results.into_iter().map(|r| r.0).collect();
    summary.passed = summary.experiments.iter().all(|e| e.passed);
    output::write_json(&root.join("summary.json"), &summary)?;
    let meta = Metadata {
        tool_version: env!("CARGO_PKG_VERSION"),
        started_unix_seconds: started,
        finished_unix_seconds: unix_now(),
        jobs: opts.jobs,
        check: opts.check,
        timings,
    };
    output::write_json(&root.join("metadata.json"), &meta)?;
    Ok(RunReport { summary, output_dir: Some(root), seconds })
}

pub fn list_text() -> String {
    let width = REGISTRY.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
    REGISTRY.iter().map(|(n, d)| format!("{n:width$}  {d}\n")).collect()
}

pub fn schema_json() -> serde_json::Value {
    let experiments: serde_json::Map<String, serde_json::Value> = Experiment::defaults()
        .into_iter()
        .zip(REGISTRY)
        .map(|(e, (name, desc))| {
            let mut v = serde_json::to_value(&e).expect("parameters serialize");
            if let Some(obj) = v.as_object_mut() {
                obj.remove("name");
            }
            ((*name).to_string(), serde_json::json!({ "description": desc, "defaults": v }))
        })
        .collect();
    serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "fields": {
            "schema_version": "integer, must equal the value above",
            "seed": "unsigned 64-bit integer; all randomness derives from it",
            "output_dir": "string, optional; overridden by PATHQUANT_OUT_DIR and --out",
            "experiments": "array of objects with a \"name\" field plus optional parameters; unknown fields are rejected",
        },
        "experiments": experiments,
    })
}

pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return if code == 0 { EXIT_OK } else { EXIT_INVALID };
        }
    };
    match cli.command {
        Command::List => {
            let _ = write!(std::io::stdout(), "{}", list_text());
            EXIT_OK
        }
        Command::Schema => {
            let _ = writeln!(
                std::io::stdout(),
                "{}",
                serde_json::to_string_pretty(&schema_json()).expect("schema serializes")
            );
            EXIT_OK
        }
        Command::Run { config, check, jobs, out } => {
            let result = Config::load(&config).and_then(|cfg| run_config(&cfg, &RunOptions { check, jobs, out }));
            match result {
                Ok(report) => {
                    for e in &report.summary.experiments {
                        let status = if e.passed { "ok" } else { "FAILED" };
                        match &e.error {
                            Some(msg) => eprintln!("{:02} {:<20} {status}: {msg}", e.index, e.name),
                            None => eprintln!("{:02} {:<20} {status}", e.index, e.name),
                        }
                    }
                    report.exit_code(check)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
    }
}
