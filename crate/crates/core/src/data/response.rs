use crate::engine::Family;
use crate::error::{Error, Result};

/// Response values tagged with the model family they are validated for.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseVector {
    values: Vec<f64>,
    family: Family,
}

impl ResponseVector {
    pub fn new(values: Vec<f64>, family: Family) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!("response value {i} is not finite")));
        }
        match family {
            Family::Gaussian => {}
            Family::Logistic => {
                if let Some(i) = values.iter().position(|&v| v != 0.0 && v != 1.0) {
                    return Err(Error::data(format!(
                        "logistic response must be 0 or 1, found {} at row {i}",
                        values[i]
                    )));
                }
                let ones = values.iter().filter(|&&v| v == 1.0).count();
                if ones == 0 || ones == values.len() {
                    return Err(Error::data("logistic response needs both classes present"));
                }
            }
            Family::Poisson => {
                if let Some(i) = values.iter().position(|&v| v < 0.0 || v.fract() != 0.0) {
                    return Err(Error::data(format!(
                        "poisson response must be a nonnegative integer, found {} at row {i}",
                        values[i]
                    )));
                }
            }
        }
        Ok(ResponseVector { values, family })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn select(&self, rows: &[usize]) -> Result<ResponseVector> {
        ResponseVector::new(rows.iter().map(|&i| self.values[i]).collect(), self.family)
    }

    /// Integer class labels for stratified fold assignment (logistic only).
    pub fn strata(&self) -> Option<Vec<usize>> {
        (self.family == Family::Logistic).then(|| self.values.iter().map(|&v| v as usize).collect())
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> ResponseVector {
        ResponseVector {
            values,
            family: self.family,
        }
    }
}
