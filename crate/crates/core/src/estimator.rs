//! Flat estimator surface for language bindings.
//!
//! Parameters live in a string-keyed map of JSON values and features cross
//! the boundary as one row-major `f64` buffer, converted once to the core's
//! layout per fit. All arithmetic happens here, not in the binding.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::data::{DesignMatrix, GroupStructure, ResponseVector};
use crate::engine::{Family, SplicingConfig};
use crate::error::{Error, Result};
use crate::selection::{select, Dataset, IcKind, ScreenSize, SelectionOptions, SelectionReport, Tuning};

/// Every parameter the estimator accepts, with its default.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorParams {
    pub family: Family,
    /// Fixes the support size; overrides `s_min`/`s_max`.
    pub support_size: Option<usize>,
    pub s_min: Option<usize>,
    pub s_max: Option<usize>,
    pub ic_type: IcKind,
    /// Cross-validation folds; `None` tunes by `ic_type`.
    pub cv: Option<usize>,
    pub gsection: bool,
    pub lambda: f64,
    pub k_max: Option<usize>,
    pub tau_const: f64,
    pub max_splice_iter: usize,
    pub swap_check_budget: usize,
    pub screening_size: Option<usize>,
    pub normalize: bool,
    /// Group id per column; `None` means one group per column.
    pub group: Option<Vec<usize>>,
    pub always_include: Vec<usize>,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl EstimatorParams {
    pub fn new(family: Family) -> Self {
        let defaults = SplicingConfig::default();
        EstimatorParams {
            family,
            support_size: None,
            s_min: None,
            s_max: None,
            ic_type: IcKind::Gic,
            cv: None,
            gsection: false,
            lambda: defaults.lambda,
            k_max: defaults.k_max,
            tau_const: defaults.tau_const,
            max_splice_iter: defaults.max_splice_iter,
            swap_check_budget: defaults.swap_check_budget,
            screening_size: None,
            normalize: true,
            group: None,
            always_include: Vec::new(),
            seed: defaults.seed,
            threads: None,
        }
    }

    pub fn to_map(&self) -> BTreeMap<String, Value> {
        let entries = [
            ("family", json!(self.family.name())),
            ("support_size", json!(self.support_size)),
            ("s_min", json!(self.s_min)),
            ("s_max", json!(self.s_max)),
            ("ic_type", json!(self.ic_type.name())),
            ("cv", json!(self.cv)),
            ("gsection", json!(self.gsection)),
            ("lambda", json!(self.lambda)),
            ("k_max", json!(self.k_max)),
            ("tau_const", json!(self.tau_const)),
            ("max_splice_iter", json!(self.max_splice_iter)),
            ("swap_check_budget", json!(self.swap_check_budget)),
            ("screening_size", json!(self.screening_size)),
            ("normalize", json!(self.normalize)),
            ("group", json!(self.group)),
            ("always_include", json!(self.always_include)),
            ("seed", json!(self.seed)),
            ("threads", json!(self.threads)),
        ];
        entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn set(&mut self, key: &str, value: &Value) -> Result<()> {
        let bad = || Error::usage(format!("invalid value {value} for parameter '{key}'"));
        let uint = |v: &Value| v.as_u64().map(|u| u as usize).ok_or_else(bad);
        let opt_uint = |v: &Value| if v.is_null() { Ok(None) } else { uint(v).map(Some) };
        let float = |v: &Value| v.as_f64().ok_or_else(bad);
        let boolean = |v: &Value| v.as_bool().ok_or_else(bad);
        let text = |v: &Value| v.as_str().map(str::to_owned).ok_or_else(bad);
        let uint_list = |v: &Value| -> Result<Vec<usize>> {
            v.as_array().ok_or_else(bad)?.iter().map(uint).collect()
        };
        match key {
            "family" => self.family = text(value)?.parse()?,
            "support_size" => self.support_size = opt_uint(value)?,
            "s_min" => self.s_min = opt_uint(value)?,
            "s_max" => self.s_max = opt_uint(value)?,
            "ic_type" => self.ic_type = text(value)?.parse()?,
            "cv" => self.cv = opt_uint(value)?,
            "gsection" => self.gsection = boolean(value)?,
            "lambda" => self.lambda = float(value)?,
            "k_max" => self.k_max = opt_uint(value)?,
            "tau_const" => self.tau_const = float(value)?,
            "max_splice_iter" => self.max_splice_iter = uint(value)?,
            "swap_check_budget" => self.swap_check_budget = uint(value)?,
            "screening_size" => self.screening_size = opt_uint(value)?,
            "normalize" => self.normalize = boolean(value)?,
            "group" => {
                self.group = if value.is_null() { None } else { Some(uint_list(value)?) }
            }
            "always_include" => self.always_include = uint_list(value)?,
            "seed" => self.seed = value.as_u64().ok_or_else(bad)?,
            "threads" => self.threads = opt_uint(value)?,
            _ => return Err(Error::usage(format!("unknown parameter '{key}'"))),
        }
        Ok(())
    }

    fn options(&self) -> SelectionOptions {
        SelectionOptions {
            splicing: SplicingConfig {
                k_max: self.k_max,
                tau_const: self.tau_const,
                max_splice_iter: self.max_splice_iter,
                swap_check_budget: self.swap_check_budget,
                lambda: self.lambda,
                seed: self.seed,
                ..SplicingConfig::default()
            },
            normalize: self.normalize,
            screen: self.screening_size.map(ScreenSize::Fixed),
            threads: self.threads,
        }
    }

    fn tuning(&self) -> Result<Tuning> {
        if let Some(s) = self.support_size {
            return Ok(Tuning::Fixed(s));
        }
        let s_list = match (self.s_min, self.s_max) {
            (None, None) => None,
            (lo, Some(hi)) => Some((lo.unwrap_or(0)..=hi).collect()),
            (Some(_), None) => return Err(Error::usage("s_min requires s_max")),
        };
        Ok(match self.cv {
            Some(folds) => Tuning::Cv {
                s_list,
                folds,
                seed: self.seed,
            },
            None => Tuning::Path {
                s_list,
                criterion: self.ic_type,
                gsection: self.gsection,
            },
        })
    }
}

/// Attributes of a fitted estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    /// Raw scale, length p.
    pub coef: Vec<f64>,
    pub intercept: f64,
    pub selected: Vec<usize>,
    pub chosen_s: usize,
    pub report: SelectionReport,
}

#[derive(Debug, Clone)]
pub struct Estimator {
    params: EstimatorParams,
    fitted: Option<FittedModel>,
}

impl Estimator {
    pub fn new(family: Family) -> Self {
        Estimator {
            params: EstimatorParams::new(family),
            fitted: None,
        }
    }

    pub fn params(&self) -> &EstimatorParams {
        &self.params
    }

    pub fn get_params(&self) -> BTreeMap<String, Value> {
        self.params.to_map()
    }

    /// Sets one parameter; a successful call discards any previous fit.
    pub fn set_param(&mut self, key: &str, value: Value) -> Result<()> {
        self.params.set(key, &value)?;
        self.fitted = None;
        Ok(())
    }

    /// Applies all entries or none.
    pub fn set_params(&mut self, params: &BTreeMap<String, Value>) -> Result<()> {
        let mut next = self.params.clone();
        for (k, v) in params {
            next.set(k, v)?;
        }
        self.params = next;
        self.fitted = None;
        Ok(())
    }

    pub fn fitted(&self) -> Option<&FittedModel> {
        self.fitted.as_ref()
    }

    /// Fits on `n x p` row-major features.
    pub fn fit_row_major(&mut self, n: usize, p: usize, x: &[f64], y: &[f64]) -> Result<&FittedModel> {
        if x.len() != n * p {
            return Err(Error::usage(format!("feature buffer has {} values, expected {n} x {p}", x.len())));
        }
        if y.len() != n {
            return Err(Error::usage(format!("response has {} values, expected {n}", y.len())));
        }
        let design = DesignMatrix::from_row_major(n, p, x)?;
        self.fit(design, y)
    }

    pub fn fit(&mut self, x: DesignMatrix, y: &[f64]) -> Result<&FittedModel> {
        let p = x.p();
        let response = ResponseVector::new(y.to_vec(), self.params.family)?;
        let groups = match &self.params.group {
            Some(g) if g.len() != p => {
                return Err(Error::usage(format!("group has {} entries, expected {p}", g.len())))
            }
            Some(g) => GroupStructure::new(g.clone(), Vec::new())?,
            None => GroupStructure::singletons(p),
        }
        .with_always_included(&self.params.always_include)?;
        let data = Dataset::new(x, response, groups)?;
        let report = select(&data, &self.params.options(), &self.params.tuning()?)?;
        let chosen = report.chosen();
        self.fitted = Some(FittedModel {
            coef: report.coefficients(),
            intercept: report.intercept(),
            selected: chosen.selected.clone(),
            chosen_s: report.chosen_s,
            report,
        });
        Ok(self.fitted.as_ref().expect("just fitted"))
    }

    fn linear_predictor(&self, n: usize, p: usize, x: &[f64]) -> Result<Vec<f64>> {
        let fit = self.fitted.as_ref().ok_or_else(|| Error::usage("estimator is not fitted"))?;
        if p != fit.coef.len() {
            return Err(Error::usage(format!("X has {p} columns, the model was fitted on {}", fit.coef.len())));
        }
        if x.len() != n * p {
            return Err(Error::usage(format!("feature buffer has {} values, expected {n} x {p}", x.len())));
        }
        Ok(x.chunks(p.max(1))
            .take(n)
            .map(|row| fit.intercept + row.iter().zip(&fit.coef).map(|(a, b)| a * b).sum::<f64>())
            .collect())
    }

    /// Gaussian: `eta`; logistic: class label at probability 0.5; poisson:
    /// `exp(eta)`.
    pub fn predict(&self, n: usize, p: usize, x: &[f64]) -> Result<Vec<f64>> {
        let family = self.params.family;
        let eta = self.linear_predictor(n, p, x)?;
        Ok(match family {
            Family::Gaussian => eta,
            Family::Logistic => eta.iter().map(|&e| f64::from(u8::from(family.mean(e) >= 0.5))).collect(),
            Family::Poisson => eta.iter().map(|&e| family.mean(e)).collect(),
        })
    }

    /// Class-1 probabilities; logistic only.
    pub fn predict_proba(&self, n: usize, p: usize, x: &[f64]) -> Result<Vec<f64>> {
        if self.params.family != Family::Logistic {
            return Err(Error::usage("predict_proba requires the logistic family"));
        }
        let eta = self.linear_predictor(n, p, x)?;
        Ok(eta.iter().map(|&e| Family::Logistic.mean(e)).collect())
    }

    /// R^2 for gaussian and poisson predictions, accuracy for logistic.
    pub fn score(&self, n: usize, p: usize, x: &[f64], y: &[f64]) -> Result<f64> {
        if y.len() != n {
            return Err(Error::usage(format!("response has {} values, expected {n}", y.len())));
        }
        let pred = self.predict(n, p, x)?;
        Ok(match self.params.family {
            Family::Logistic => pred.iter().zip(y).filter(|(a, b)| a == b).count() as f64 / n as f64,
            Family::Gaussian | Family::Poisson => {
                let mean = y.iter().sum::<f64>() / n as f64;
                let ss_res: f64 = pred.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
                let ss_tot: f64 = y.iter().map(|b| (b - mean).powi(2)).sum();
                if ss_tot == 0.0 {
                    if ss_res == 0.0 { 1.0 } else { 0.0 }
                } else {
                    1.0 - ss_res / ss_tot
                }
            }
        })
    }
}
