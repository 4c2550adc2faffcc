use crate::data::DesignMatrix;
use crate::error::{Error, Result};

/// Symmetric PSD `p x p` matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceView {
    p: usize,
    values: Vec<f64>,
}

impl CovarianceView {
    /// `S = X_c^T X_c / n` with `X_c` the column-centered effective design.
    pub fn from_data(x: &DesignMatrix) -> Result<Self> {
        let (n, p) = (x.n(), x.p());
        if n < 2 {
            return Err(Error::data("covariance needs at least two samples"));
        }
        let centered: Vec<Vec<f64>> = (0..p)
            .map(|j| {
                let mut col = x.column(j);
                let mean = col.iter().sum::<f64>() / n as f64;
                col.iter_mut().for_each(|v| *v -= mean);
                col
            })
            .collect();
        let mut values = vec![0.0; p * p];
        for i in 0..p {
            for j in i..p {
                let v = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
                values[i * p + j] = v;
                values[j * p + i] = v;
            }
        }
        Ok(CovarianceView { p, values })
    }

    /// Validates symmetry to `1e-12 * max(1, |S_ij|)` and a nonnegative
    /// diagonal; the stored matrix is the symmetrized input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.len();
        if p == 0 {
            return Err(Error::data("covariance matrix is empty"));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::data(format!(
                "covariance row {i} has {} entries, expected {p}",
                rows[i].len()
            )));
        }
        let mut values = vec![0.0; p * p];
        for i in 0..p {
            if !(rows[i][i] >= 0.0) {
                return Err(Error::data(format!("covariance diagonal entry {i} is {}", rows[i][i])));
            }
            for j in 0..p {
                let (a, b) = (rows[i][j], rows[j][i]);
                if !a.is_finite() {
                    return Err(Error::Cell {
                        row: i,
                        column: j,
                        message: "non-finite covariance entry".into(),
                    });
                }
                if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                    return Err(Error::data(format!("covariance is not symmetric at ({i}, {j})")));
                }
                values[i * p + j] = 0.5 * (a + b);
            }
        }
        Ok(CovarianceView { p, values })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p + j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.p).map(|i| self.get(i, i)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.p).map(<[f64]>::to_vec).collect()
    }

    /// Row-major principal submatrix on `idx`.
    pub fn principal(&self, idx: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(idx.len() * idx.len());
        for &i in idx {
            for &j in idx {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.values
            .chunks(self.p)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `v^T S v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Projection deflation `(I - v v^T) S (I - v v^T)` for a unit `v`.
    pub fn deflate(&self, v: &[f64]) -> Result<CovarianceView> {
        if v.len() != self.p {
            return Err(Error::usage(format!("loading has length {}, expected {}", v.len(), self.p)));
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::usage(format!("deflation vector has norm {norm}, expected 1")));
        }
        let sv = self.mul_vec(v);
        let q = sv.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let p = self.p;
        let mut values = vec![0.0; p * p];
        for i in 0..p {
            for j in i..p {
                let d = self.get(i, j) - v[i] * sv[j] - sv[i] * v[j] + q * v[i] * v[j];
                values[i * p + j] = d;
                values[j * p + i] = d;
            }
        }
        Ok(CovarianceView { p, values })
    }
}
