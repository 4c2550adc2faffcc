use serde::Serialize;

use crate::engine::Family;
use crate::error::{Error, Result};
use crate::selection::criterion::{serialize_real, IcKind, IcValues};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Criterion {
    Ic { ic: IcKind },
    Cv { folds: usize },
}

impl Criterion {
    pub fn name(&self) -> String {
        match self {
            Criterion::Ic { ic } => ic.name().to_string(),
            Criterion::Cv { .. } => "cv".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvSummary {
    pub mean: f64,
    pub sd: f64,
    pub fold_losses: Vec<f64>,
}

/// One support size of a path, reported on the raw data scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathEntry {
    pub s: usize,
    /// Selected non-nuisance groups, original ids.
    pub active_groups: Vec<usize>,
    /// Selected columns (nuisance columns included), original 0-based indices.
    pub selected: Vec<usize>,
    /// Raw-scale coefficients aligned with `selected`.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    #[serde(serialize_with = "serialize_real")]
    pub deviance: f64,
    pub ic: IcValues,
    pub cv: Option<CvSummary>,
    pub converged: bool,
    pub failure: Option<String>,
    pub wall_ms: f64,
}

impl PathEntry {
    pub(crate) fn failed(s: usize, message: String) -> Self {
        PathEntry {
            s,
            active_groups: Vec::new(),
            selected: Vec::new(),
            coefficients: Vec::new(),
            intercept: f64::NAN,
            deviance: f64::NAN,
            ic: IcValues {
                aic: f64::NAN,
                bic: f64::NAN,
                gic: f64::NAN,
                ebic: f64::NAN,
            },
            cv: None,
            converged: false,
            failure: Some(message),
            wall_ms: 0.0,
        }
    }

    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }

    /// The value minimized by `criterion`, if this entry competes.
    pub fn score(&self, criterion: Criterion) -> Option<f64> {
        if self.is_failed() {
            return None;
        }
        let v = match criterion {
            Criterion::Ic { ic } => self.ic.get(ic),
            Criterion::Cv { .. } => self.cv.as_ref()?.mean,
        };
        (!v.is_nan()).then_some(v)
    }
}

/// A tuned support-size path and the chosen model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionReport {
    pub family: Family,
    pub n: usize,
    pub p: usize,
    pub path: Vec<PathEntry>,
    pub chosen_s: usize,
    pub criterion: Criterion,
    pub seed: u64,
}

impl SelectionReport {
    pub(crate) fn assemble(
        family: Family,
        n: usize,
        p: usize,
        mut path: Vec<PathEntry>,
        criterion: Criterion,
        seed: u64,
    ) -> Result<Self> {
        path.sort_by_key(|e| e.s);
        let chosen_s = argmin(&path, criterion).ok_or_else(|| {
            let why = path.iter().find_map(|e| e.failure.clone()).unwrap_or_default();
            Error::numerical(format!("no support size could be fitted ({why})"))
        })?;
        Ok(SelectionReport {
            family,
            n,
            p,
            path,
            chosen_s,
            criterion,
            seed,
        })
    }

    pub fn chosen(&self) -> &PathEntry {
        self.path.iter().find(|e| e.s == self.chosen_s).expect("chosen entry is on the path")
    }

    /// Length-p raw-scale coefficient vector of the chosen model.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut beta = vec![0.0; self.p];
        let c = self.chosen();
        for (&j, &b) in c.selected.iter().zip(&c.coefficients) {
            beta[j] = b;
        }
        beta
    }

    pub fn intercept(&self) -> f64 {
        self.chosen().intercept
    }

    pub fn all_converged(&self) -> bool {
        self.path.iter().all(|e| e.converged)
    }

    /// Zeroes every wall-clock field so reports can be compared byte for byte.
    pub fn without_timing(mut self) -> Self {
        for e in &mut self.path {
            e.wall_ms = 0.0;
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Entry minimizing the criterion; ties go to the smallest `s`.
pub fn argmin(path: &[PathEntry], criterion: Criterion) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for e in path {
        if let Some(v) = e.score(criterion) {
            if best.is_none_or(|(s, b)| v < b || (v == b && e.s < s)) {
                best = Some((e.s, v));
            }
        }
    }
    best.map(|(s, _)| s)
}
