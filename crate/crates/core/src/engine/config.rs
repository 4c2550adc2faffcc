use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tuning knobs for one fixed-support-size solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplicingConfig {
    /// Number of selected groups, nuisance groups excluded.
    pub support_size: usize,
    /// Largest swap size tried per splice; `None` means `min(s, 5)`.
    pub k_max: Option<usize>,
    /// Constant in the splice acceptance threshold.
    pub tau_const: f64,
    pub max_splice_iter: usize,
    /// At a fixed point of the ranked splices every single exchange is
    /// refitted when `s * (inactive groups)` is at most this; 0 disables.
    pub swap_check_budget: usize,
    /// Ridge penalty on the coefficients (never on the intercept).
    pub lambda: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub seed: u64,
}

impl Default for SplicingConfig {
    fn default() -> Self {
        SplicingConfig {
            support_size: 0,
            k_max: None,
            tau_const: 0.01,
            max_splice_iter: 20,
            swap_check_budget: 256,
            lambda: 0.0,
            newton_tol: 1e-8,
            newton_max_iter: 30,
            seed: 0,
        }
    }
}

impl SplicingConfig {
    pub fn with_support_size(&self, s: usize) -> Self {
        SplicingConfig {
            support_size: s,
            ..self.clone()
        }
    }

    pub fn effective_k_max(&self) -> usize {
        self.k_max.unwrap_or(self.support_size.min(5)).max(1)
    }

    /// Splice acceptance threshold `c * s * ln(p) * ln(ln n) / n`.
    ///
    /// For `n < 3` the `ln(ln n)` factor is replaced by 1.
    pub fn tau(&self, n: usize, p: usize) -> f64 {
        let nf = n as f64;
        let loglog = if n >= 3 { nf.ln().ln() } else { 1.0 };
        self.tau_const * self.support_size as f64 * (p as f64).ln() * loglog / nf
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max == Some(0) {
            return Err(Error::usage("k_max must be at least 1"));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::usage(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.tau_const > 0.0) {
            return Err(Error::usage("tau constant must be positive"));
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iter == 0 {
            return Err(Error::usage("newton tolerance and iteration cap must be positive"));
        }
        Ok(())
    }
}
