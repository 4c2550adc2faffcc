use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::DesignMatrix;
use crate::error::Error;

/// Linear predictors are clamped to this range before exponentiation.
pub const ETA_CLAMP: f64 = 30.0;
/// Floor applied to logistic Hessian weights.
pub const LOGISTIC_WEIGHT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Logistic,
    Poisson,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Logistic => "logistic",
            Family::Poisson => "poisson",
        }
    }

    #[inline]
    pub fn clamp(self, eta: f64) -> f64 {
        match self {
            Family::Gaussian => eta,
            _ => eta.clamp(-ETA_CLAMP, ETA_CLAMP),
        }
    }

    /// Mean response for a linear predictor.
    #[inline]
    pub fn mean(self, eta: f64) -> f64 {
        let eta = self.clamp(eta);
        match self {
            Family::Gaussian => eta,
            Family::Logistic => 1.0 / (1.0 + (-eta).exp()),
            Family::Poisson => eta.exp(),
        }
    }

    /// Hessian weight of one observation.
    #[inline]
    pub fn weight(self, eta: f64) -> f64 {
        match self {
            Family::Gaussian => 1.0,
            Family::Logistic => {
                let mu = self.mean(eta);
                (mu * (1.0 - mu)).max(LOGISTIC_WEIGHT_FLOOR)
            }
            Family::Poisson => self.mean(eta),
        }
    }

    /// Per-observation loss (negative log-likelihood up to constants).
    #[inline]
    pub fn pointwise_loss(self, y: f64, eta: f64) -> f64 {
        let eta = self.clamp(eta);
        match self {
            Family::Gaussian => 0.5 * (y - eta) * (y - eta),
            Family::Logistic => softplus(eta) - y * eta,
            Family::Poisson => eta.exp() - y * eta,
        }
    }

    /// Intercept of the null model fitted to a response with mean `ybar`.
    pub fn null_intercept(self, ybar: f64) -> f64 {
        match self {
            Family::Gaussian => ybar,
            Family::Logistic => {
                let p = ybar.clamp(1e-12, 1.0 - 1e-12);
                (p / (1.0 - p)).ln().clamp(-ETA_CLAMP, ETA_CLAMP)
            }
            Family::Poisson => ybar.ln().max(-ETA_CLAMP),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "linear" => Ok(Family::Gaussian),
            "logistic" | "binomial" => Ok(Family::Logistic),
            "poisson" => Ok(Family::Poisson),
            other => Err(Error::usage(format!("unknown family {other:?}"))),
        }
    }
}

#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Mean pointwise loss, without any penalty.
pub fn unpenalized_loss(family: Family, y: &[f64], eta: &[f64]) -> f64 {
    let total: f64 = y.iter().zip(eta).map(|(&y, &e)| family.pointwise_loss(y, e)).sum();
    total / y.len() as f64
}

/// Loss, negative gradient and Hessian weights at `(intercept, beta)`.
#[derive(Debug, Clone)]
pub struct LossEval {
    /// Penalized loss.
    pub loss: f64,
    /// `(1/n) X^T (y - mu) - 2 lambda beta`, i.e. minus the gradient in beta.
    pub grad: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn family_loss_grad_weights(
    family: Family,
    x: &DesignMatrix,
    y: &[f64],
    intercept: f64,
    beta: &[f64],
    lambda: f64,
) -> LossEval {
    let n = x.n() as f64;
    let eta = x.linear_predictor(intercept, beta);
    let resid: Vec<f64> = y.iter().zip(&eta).map(|(&y, &e)| y - family.mean(e)).collect();
    let ridge: f64 = beta.iter().map(|b| b * b).sum();
    let grad = x
        .xt_dot(&resid)
        .into_iter()
        .zip(beta)
        .map(|(g, b)| g / n - 2.0 * lambda * b)
        .collect();
    LossEval {
        loss: unpenalized_loss(family, y, &eta) + lambda * ridge,
        grad,
        weights: eta.iter().map(|&e| family.weight(e)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_at_zero() {
        let x = DesignMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let e = family_loss_grad_weights(Family::Gaussian, &x, &[2.0, 3.0], 0.0, &[0.0, 0.0], 0.0);
        assert_eq!(e.loss, 3.25);
        assert_eq!(e.grad, vec![1.0, 1.5]);
        assert_eq!(e.weights, vec![1.0, 1.0]);
    }

    #[test]
    fn logistic_at_zero() {
        let x = DesignMatrix::from_rows(&[vec![1.0], vec![-2.0], vec![0.5]]).unwrap();
        let e = family_loss_grad_weights(Family::Logistic, &x, &[1.0, 0.0, 1.0], 0.0, &[0.0], 0.0);
        assert!((e.loss - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(e.weights.iter().all(|&w| w == 0.25));
        assert_eq!(Family::Logistic.mean(0.0), 0.5);
    }

    #[test]
    fn clamping_keeps_values_finite() {
        for fam in [Family::Logistic, Family::Poisson] {
            for eta in [-1e6, -31.0, 31.0, 1e6] {
                assert!(fam.pointwise_loss(1.0, eta).is_finite());
                assert!(fam.weight(eta).is_finite() && fam.weight(eta) >= 0.0);
            }
        }
        assert_eq!(Family::Logistic.weight(1e6), LOGISTIC_WEIGHT_FLOOR);
    }

    #[test]
    fn ridge_term_enters_loss_and_gradient() {
        let x = DesignMatrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap();
        let e = family_loss_grad_weights(Family::Gaussian, &x, &[0.0, 0.0], 0.0, &[2.0], 0.5);
        // (1/4)(4 + 4) + 0.5 * 4
        assert_eq!(e.loss, 4.0);
        // (1/2)(-2 - 2) - 2 * 0.5 * 2
        assert_eq!(e.grad, vec![-4.0]);
    }

    #[test]
    fn parse_names() {
        assert_eq!("Gaussian".parse::<Family>().unwrap(), Family::Gaussian);
        assert_eq!("binomial".parse::<Family>().unwrap(), Family::Logistic);
        assert!("gamma".parse::<Family>().is_err());
    }
}
