use crate::data::matrix::{DesignMatrix, Storage};
use crate::data::response::ResponseVector;
use crate::engine::Family;
use crate::error::{Error, Result};

/// Maps coefficients fitted on standardized data back to the raw scale.
#[derive(Debug, Clone, PartialEq)]
pub struct BackTransform {
    means: Vec<f64>,
    scales: Vec<f64>,
    y_mean: f64,
}

impl BackTransform {
    pub fn identity(p: usize) -> Self {
        BackTransform {
            means: vec![0.0; p],
            scales: vec![1.0; p],
            y_mean: 0.0,
        }
    }

    pub fn p(&self) -> usize {
        self.means.len()
    }

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    /// `beta_j = b_j / scale_j`, `beta_0 = b_0 + ybar - sum_j beta_j mean_j`.
    pub fn to_raw(&self, beta: &[f64], intercept: f64) -> (Vec<f64>, f64) {
        let raw: Vec<f64> = beta.iter().zip(&self.scales).map(|(b, s)| b / s).collect();
        let shift: f64 = raw
            .iter()
            .zip(&self.means)
            .filter(|(b, _)| **b != 0.0)
            .map(|(b, m)| b * m)
            .sum();
        (raw, intercept + self.y_mean - shift)
    }

    pub fn to_standardized(&self, beta: &[f64], intercept: f64) -> (Vec<f64>, f64) {
        let shift: f64 = beta
            .iter()
            .zip(&self.means)
            .filter(|(b, _)| **b != 0.0)
            .map(|(b, m)| b * m)
            .sum();
        let std = beta.iter().zip(&self.scales).map(|(b, s)| b * s).collect();
        (std, intercept - self.y_mean + shift)
    }

    pub fn select_columns(&self, cols: &[usize]) -> BackTransform {
        BackTransform {
            means: cols.iter().map(|&j| self.means[j]).collect(),
            scales: cols.iter().map(|&j| self.scales[j]).collect(),
            y_mean: self.y_mean,
        }
    }
}

/// Centers and scales every column to unit population variance.
///
/// Dense columns are centered in place. Sparse columns are only divided by
/// their standard deviation; the centering is carried as a virtual offset so
/// no structural zero is filled in. For the gaussian family the response is
/// centered as well.
pub fn normalize(
    x: &DesignMatrix,
    y: &ResponseVector,
) -> Result<(DesignMatrix, ResponseVector, BackTransform)> {
    if x.is_normalized() {
        return Err(Error::usage("matrix is already normalized"));
    }
    if y.len() != x.n() {
        return Err(Error::data(format!(
            "response has {} values but the matrix has {} rows",
            y.len(),
            x.n()
        )));
    }
    let (n, p) = (x.n(), x.p());
    let mut means = Vec::with_capacity(p);
    let mut scales = Vec::with_capacity(p);
    for j in 0..p {
        let (mean, var) = x.column_stats(j);
        let sd = var.sqrt();
        if !(sd > 1e-12 * mean.abs().max(1.0)) {
            return Err(Error::ZeroVariance(j));
        }
        means.push(mean);
        scales.push(sd);
    }

    let (storage, offsets) = match x.storage() {
        Storage::Dense(d) => {
            let mut out = d.clone();
            for j in 0..p {
                for v in &mut out[j * n..(j + 1) * n] {
                    *v = (*v - means[j]) / scales[j];
                }
            }
            (Storage::Dense(out), vec![0.0; p])
        }
        Storage::Sparse(s) => {
            let mut out = s.clone();
            for j in 0..p {
                for v in &mut out.values[s.col_ptr[j]..s.col_ptr[j + 1]] {
                    *v /= scales[j];
                }
            }
            let offsets = (0..p).map(|j| means[j] / scales[j]).collect();
            (Storage::Sparse(out), offsets)
        }
    };

    let (y_out, y_mean) = if y.family() == Family::Gaussian {
        let m = y.mean();
        (y.with_values(y.values().iter().map(|v| v - m).collect()), m)
    } else {
        (y.clone(), 0.0)
    };

    let back = BackTransform {
        means: means.clone(),
        scales: scales.clone(),
        y_mean,
    };
    let xs = DesignMatrix::into_normalized(n, p, storage, means, scales, offsets);
    Ok((xs, y_out, back))
}
