use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use bestsubset::selection::SelectionReport;
use bestsubset::spca::SpcaPath;
use bestsubset::{Error, Result};

/// Top-level JSON report; every command fills the same keys.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub family: Option<String>,
    pub n: Option<usize>,
    pub p: usize,
    pub selected: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub intercept: Value,
    pub deviance: Value,
    pub ic: Value,
    pub path: Value,
    pub chosen_s: Option<usize>,
    pub converged: bool,
    pub seed: u64,
    pub timing_ms: f64,
    pub version: &'static str,
}

/// JSON number, or `"-inf"`/`"inf"`/null for non-finite values.
pub fn real(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        Value::Null
    } else if v < 0.0 {
        json!("-inf")
    } else {
        json!("inf")
    }
}

impl Report {
    pub fn from_selection(command: &'static str, report: &SelectionReport, seed: u64) -> Report {
        let chosen = report.chosen();
        Report {
            command,
            family: Some(report.family.name().to_string()),
            n: Some(report.n),
            p: report.p,
            selected: chosen.selected.clone(),
            coefficients: chosen.coefficients.clone(),
            intercept: real(chosen.intercept),
            deviance: real(chosen.deviance),
            ic: serde_json::to_value(chosen.ic).expect("ic serializes"),
            path: serde_json::to_value(&report.path).expect("path serializes"),
            chosen_s: Some(report.chosen_s),
            converged: report.all_converged(),
            seed,
            timing_ms: 0.0,
            version: bestsubset::VERSION,
        }
    }

    /// The last loading of the path is the reported one.
    pub fn from_spca(path: &SpcaPath, n: Option<usize>, p: usize, seed: u64) -> Report {
        let last = path.loadings.last().expect("non-empty path");
        Report {
            command: "spca",
            family: None,
            n,
            p,
            selected: last.support.clone(),
            coefficients: last.support.iter().map(|&j| last.loading[j]).collect(),
            intercept: Value::Null,
            deviance: Value::Null,
            ic: Value::Null,
            path: serde_json::to_value(path).expect("spca path serializes"),
            chosen_s: Some(last.support.len()),
            converged: path.loadings.iter().all(|l| l.converged),
            seed,
            timing_ms: 0.0,
            version: bestsubset::VERSION,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// `s,deviance,ic_or_cvloss` rows; failed sizes leave the values empty.
pub fn selection_curve(report: &SelectionReport) -> String {
    let mut out = String::from("s,deviance,ic_or_cvloss\n");
    for e in &report.path {
        let score = e.score(report.criterion);
        let cell = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        let deviance = (!e.is_failed()).then_some(e.deviance);
        writeln!(out, "{},{},{}", e.s, cell(deviance), cell(score)).unwrap();
    }
    out
}

pub fn spca_curve(path: &SpcaPath) -> String {
    let mut out = String::from("s,explained_variance\n");
    for l in &path.loadings {
        writeln!(out, "{},{}", l.support.len(), l.explained_variance).unwrap();
    }
    out
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
