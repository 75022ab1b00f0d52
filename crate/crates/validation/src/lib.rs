//! Acceptance criteria over a suite run. Thresholds are pinned here and do
//! not read the tolerances stored in the config.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::Value;

pub const CONFIG: &str = include_str!("../../../configs/acceptance.json");

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} criterion {:>2} {}: {}", self.id, self.title, self.detail)
    }
}

/// One experiment's `summary.json` plus its wall time.
#[derive(Debug, Clone)]
pub struct Record {
    pub summary: Value,
    pub seconds: f64,
}

impl Record {
    pub fn metric(&self, key: &str) -> f64 {
        self.summary["metrics"][key].as_f64().unwrap_or(f64::NAN)
    }

    pub fn param(&self, key: &str) -> &Value {
        &self.summary["parameters"][key]
    }

    pub fn error(&self) -> Option<&str> {
        self.summary["error"].as_str()
    }
}

/// Reads `summary.json` and `metadata.json` of a run, keyed by experiment name.
pub fn load_run(root: &Path) -> std::io::Result<BTreeMap<String, Record>> {
    let read = |p: &Path| -> std::io::Result<Value> { Ok(serde_json::from_str(&fs::read_to_string(p)?)?) };
    let summary = read(&root.join("summary.json"))?;
    let meta = read(&root.join("metadata.json"))?;
    let mut out = BTreeMap::new();
    let exps = summary["experiments"].as_array().cloned().unwrap_or_default();
    let timings = meta["timings"].as_array().cloned().unwrap_or_default();
    for (e, t) in exps.into_iter().zip(timings) {
        let name = e["name"].as_str().unwrap_or_default().to_string();
        out.insert(name, Record { summary: e, seconds: t["seconds"].as_f64().unwrap_or(f64::NAN) });
    }
    Ok(out)
}

/// Every CSV under `root` as `(relative path, bytes)`, sorted.
pub fn csv_snapshot(root: &Path) -> std::io::Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    for d in fs::read_dir(root)? {
        let d = d?.path();
        if !d.is_dir() {
            continue;
        }
        for f in fs::read_dir(&d)? {
            let f = f?.path();
            if f.extension().is_some_and(|e| e == "csv") {
                let rel = f.strip_prefix(root).unwrap_or(&f).display().to_string();
                out.push((rel, fs::read(&f)?));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn le(x: f64, bound: f64) -> bool {
    x.is_finite() && x <= bound
}

fn verdict(
    id: u32,
    title: &'static str,
    rec: Option<&Record>,
    eval: impl FnOnce(&Record) -> (bool, String),
) -> Verdict {
    match rec {
        None => Verdict { id, title, passed: false, detail: "experiment missing from the run".into() },
        Some(r) => match r.error() {
            Some(e) => Verdict { id, title, passed: false, detail: format!("experiment error: {e}") },
            None => {
                let (passed, detail) = eval(r);
                Verdict { id, title, passed, detail: format!("{detail}; {:.2}s", r.seconds) }
            }
        },
    }
}

/// Criteria 1 to 10 from one run.
pub fn evaluate(run: &BTreeMap<String, Record>) -> Vec<Verdict> {
    let get = |n: &str| run.get(n);
    vec![
        verdict(1, "negative norm", get("negative-norm"), |r| {
            let (lam, gap) = (r.metric("min_eigenvalue"), r.metric("witness_gap"));
            let ok = r.param("n") == 24
                && lam < -0.1
                && le(gap, 1e-3)
                && r.metric("witness_value") < 0.0
                && le(r.seconds, 120.0);
            (ok, format!("min eigenvalue {lam:.6} < -0.1, witness gap {gap:.3e} <= 1e-3"))
        }),
        verdict(2, "inner-product lemma", get("inner-product-lemma"), |r| {
            let err = r.metric("max_abs_error");
            let pairs = r.param("max_order").as_u64().map_or(0, |m| (m + 1) * (m + 2) / 2);
            let ok = pairs == 6 && le(err, 1e-3) && le(r.seconds, 60.0);
            (
                ok,
                format!(
                    "{pairs} pairs, max |pi - C l2| {err:.3e} <= 1e-3, C = {:.12}",
                    r.metric("calibrated_constant")
                ),
            )
        }),
        verdict(3, "Weyl agreement", get("weyl-agreement"), |r| {
            let err = r.metric("max_relative_error");
            let ok = r.param("n") == 48 && le(err, 1e-2) && le(r.seconds, 300.0);
            (ok, format!("q, p, q^2, p^2, pq: max relative error {err:.3e} <= 1e-2 at N=48"))
        }),
        verdict(4, "Kostant-Souriau agreement", get("ks-agreement"), |r| {
            let parts: Vec<String> = ["1", "q", "p", "pq"]
                .iter()
                .map(|f| format!("{f}: {:.3e}", r.metric(&format!("max_relative_error[{f}]"))))
                .collect();
            (le(r.metric("max_relative_error"), 2e-3), format!("relative errors {} (bound 2e-3)", parts.join(", ")))
        }),
        verdict(5, "commutator and star consistency", get("commutator-star"), |r| {
            let (c, s, k) =
                (r.metric("commutator_error"), r.metric("star_commutator_error"), r.metric("composition_error"));
            let (sq, ss) = (r.metric("sigma_quantizer"), r.metric("sigma_star"));
            let ok = le(c, 2e-3) && le(s, 2e-3) && le(k, 5e-3) && sq.signum() == ss.signum();
            (ok, format!("[Q_q,Q_p] {c:.3e}, q*p-p*q {s:.3e} (<= 2e-3), Q_fQ_g vs Q_f*g {k:.3e} (<= 5e-3), sigma {sq:.6}/{ss:.6}"))
        }),
        verdict(6, "polarized form equals full form", get("simp-vs-full"), |r| {
            let err = r.metric("max_relative_error");
            (
                r.param("states") == 10 && le(err, 2e-3),
                format!("10 random states, max relative error {err:.3e} <= 2e-3"),
            )
        }),
        verdict(7, "Riemann-sum convergence", get("riemann-convergence"), |r| {
            let (e, a) = (r.metric("final_error"), r.metric("max_area_error"));
            let ok = r.param("levels") == 5 && le(e, 2e-3) && le(a, 1e-12);
            (ok, format!("x^2 left-point error {e:.3e} <= 2e-3 after 5 levels, area error {a:.3e} <= 1e-12"))
        }),
        verdict(8, "fundamental theorem pairs", get("stokes-pair"), |r| {
            let (s, x, d) = (r.metric("increment_spread"), r.metric("increment_max_error"), r.metric("disk_max_error"));
            let ok =
                r.param("triangulations").as_u64().unwrap_or(0) >= 5 && le(s, 1e-10) && le(x, 1e-10) && le(d, 1e-10);
            (ok, format!("increment spread {s:.3e}, error {x:.3e}, disk circulation error {d:.3e} (all <= 1e-10)"))
        }),
        verdict(9, "Wiener correction term", get("ito-stratonovich"), |r| {
            let (m, e) = (r.metric("max_mean_deviation_se"), r.metric("max_monotone_excess_sigma"));
            let ok = r.param("n_paths") == 10000
                && r.param("min_exponent") == 4
                && r.param("max_exponent") == 12
                && le(m, 3.0)
                && le(e, 2.0)
                && le(r.seconds, 180.0);
            (ok, format!("max |mean - 0.5| {m:.3} SE <= 3, max L2 increase {e:.3} sigma <= 2"))
        }),
        verdict(10, "smooth-path null", get("smooth-path-null"), |r| {
            let d = r.metric("max_abs_difference");
            let x = r.metric("max_abs_extrapolated");
            (
                r.param("n_steps") == 4096 && le(d, 1e-6),
                format!("max |left - midpoint| {d:.3e} (bound 1e-6) at 4096 steps; Richardson-extrapolated {x:.3e}"),
            )
        }),
    ]
}

/// Criterion 11 from two runs of the same config.
pub fn compare_runs(a: &[(String, Vec<u8>)], b: &[(String, Vec<u8>)]) -> Verdict {
    let same = !a.is_empty() && a == b;
    let differing: Vec<&str> = a.iter().zip(b).filter(|(x, y)| x != y).map(|(x, _)| x.0.as_str()).collect();
    let detail = if same {
        format!("{} CSV files byte-identical across two runs", a.len())
    } else {
        format!("{} vs {} CSV files, differing: {:?}", a.len(), b.len(), differing)
    };
    Verdict { id: 11, title: "reproducibility", passed: same, detail }
}
