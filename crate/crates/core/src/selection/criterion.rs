use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::data::DesignMatrix;
use crate::engine::{unpenalized_loss, Family};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IcKind {
    Aic,
    Bic,
    /// High-dimensional criterion with penalty `ln(p) ln(ln n)` per column.
    Gic,
    Ebic,
}

impl IcKind {
    pub const ALL: [IcKind; 4] = [IcKind::Aic, IcKind::Bic, IcKind::Gic, IcKind::Ebic];

    pub fn name(self) -> &'static str {
        match self {
            IcKind::Aic => "aic",
            IcKind::Bic => "bic",
            IcKind::Gic => "gic",
            IcKind::Ebic => "ebic",
        }
    }

    /// Penalty per selected column.
    pub fn penalty(self, n: usize, p: usize) -> f64 {
        let (n, p) = (n as f64, p as f64);
        match self {
            IcKind::Aic => 2.0,
            IcKind::Bic => n.ln(),
            IcKind::Gic => p.ln() * n.ln().ln(),
            IcKind::Ebic => n.ln() + 2.0 * p.ln(),
        }
    }
}

impl fmt::Display for IcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IcKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(IcKind::Aic),
            "bic" => Ok(IcKind::Bic),
            "gic" => Ok(IcKind::Gic),
            "ebic" => Ok(IcKind::Ebic),
            other => Err(Error::usage(format!("unknown information criterion {other:?}"))),
        }
    }
}

/// `dev + penalty(kind) * df`. `df` counts selected columns, intercept excluded.
pub fn information_criterion(dev: f64, df: usize, n: usize, p: usize, kind: IcKind) -> f64 {
    if df == 0 {
        return dev;
    }
    dev + kind.penalty(n, p) * df as f64
}

/// Family deviance from a linear predictor.
///
/// Gaussian: `n ln(RSS / n)`, or `-inf` for an interpolating fit.
/// Logistic and poisson: `2 n L` with `L` the mean unpenalized loss.
pub fn deviance_from_eta(family: Family, y: &[f64], eta: &[f64]) -> f64 {
    let n = y.len() as f64;
    match family {
        Family::Gaussian => {
            let rss: f64 = y.iter().zip(eta).map(|(y, e)| (y - e) * (y - e)).sum();
            let scale = y.iter().map(|v| v * v).sum::<f64>().max(1.0);
            if rss <= 1e-24 * scale {
                f64::NEG_INFINITY
            } else {
                n * (rss / n).ln()
            }
        }
        _ => 2.0 * n * unpenalized_loss(family, y, eta),
    }
}

pub fn deviance(family: Family, x: &DesignMatrix, y: &[f64], intercept: f64, beta: &[f64]) -> f64 {
    deviance_from_eta(family, y, &x.linear_predictor(intercept, beta))
}

/// All four criteria for one fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IcValues {
    #[serde(serialize_with = "serialize_real")]
    pub aic: f64,
    #[serde(serialize_with = "serialize_real")]
    pub bic: f64,
    #[serde(serialize_with = "serialize_real")]
    pub gic: f64,
    #[serde(serialize_with = "serialize_real")]
    pub ebic: f64,
}

impl IcValues {
    pub fn new(dev: f64, df: usize, n: usize, p: usize) -> Self {
        let ic = |k| information_criterion(dev, df, n, p, k);
        IcValues {
            aic: ic(IcKind::Aic),
            bic: ic(IcKind::Bic),
            gic: ic(IcKind::Gic),
            ebic: ic(IcKind::Ebic),
        }
    }

    pub fn get(&self, kind: IcKind) -> f64 {
        match kind {
            IcKind::Aic => self.aic,
            IcKind::Bic => self.bic,
            IcKind::Gic => self.gic,
            IcKind::Ebic => self.ebic,
        }
    }
}

/// JSON has no infinities; they are written as the strings `"-inf"`/`"inf"`.
pub fn serialize_real<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_none()
    } else if *v < 0.0 {
        s.serialize_str("-inf")
    } else {
        s.serialize_str("inf")
    }
}
