use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Compressed-sparse-column storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CscMatrix {
    /// Builds CSC storage from per-row `(column, value)` lists.
    ///
    /// Within a row the column indices must be strictly increasing.
    pub fn from_row_entries(p: usize, rows: &[Vec<(usize, f64)>]) -> Self {
        let mut counts = vec![0usize; p];
        for row in rows {
            for &(j, _) in row {
                counts[j] += 1;
            }
        }
        let mut col_ptr = Vec::with_capacity(p + 1);
        col_ptr.push(0);
        for c in &counts {
            col_ptr.push(col_ptr.last().unwrap() + c);
        }
        let nnz = *col_ptr.last().unwrap();
        let mut next = col_ptr[..p].to_vec();
        let mut row_idx = vec![0; nnz];
        let mut values = vec![0.0; nnz];
        // rows are visited in order, so row indices come out sorted per column
        for (i, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                row_idx[next[j]] = i;
                values[next[j]] = v;
                next[j] += 1;
            }
        }
        CscMatrix {
            col_ptr,
            row_idx,
            values,
        }
    }

    fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.row_idx[lo..hi], &self.values[lo..hi])
    }

    fn validate(&self, n: usize, p: usize) -> Result<()> {
        if self.col_ptr.len() != p + 1 || self.col_ptr[0] != 0 {
            return Err(Error::data("column offsets must have length p + 1 and start at 0"));
        }
        if self.col_ptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::data("column offsets must be nondecreasing"));
        }
        let nnz = self.col_ptr[p];
        if self.row_idx.len() != nnz || self.values.len() != nnz {
            return Err(Error::data("row index / value arrays do not match column offsets"));
        }
        for j in 0..p {
            let (rows, vals) = self.column(j);
            if rows.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::data(format!(
                    "row indices of column {j} are not strictly increasing"
                )));
            }
            if let Some(&r) = rows.iter().find(|&&r| r >= n) {
                return Err(Error::data(format!("row index {r} out of range in column {j}")));
            }
            if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
                return Err(Error::Cell {
                    row: rows[k],
                    column: j,
                    message: "non-finite value".into(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum Storage {
    /// Column-major `n * p` values.
    Dense(Vec<f64>),
    Sparse(CscMatrix),
}

/// An `n x p` predictor matrix, dense or sparse.
///
/// Every accessor returns the *effective* entries. For a normalized sparse
/// matrix the stored columns are only scaled; the centering is applied
/// virtually by subtracting a per-column offset, so sparsity is preserved
/// while callers see centered columns.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    n: usize,
    p: usize,
    storage: Storage,
    col_means: Vec<f64>,
    col_scales: Vec<f64>,
    offsets: Vec<f64>,
    normalized: bool,
}

impl DesignMatrix {
    pub fn dense(n: usize, p: usize, col_major: Vec<f64>) -> Result<Self> {
        check_shape(n, p)?;
        if col_major.len() != n * p {
            return Err(Error::data(format!(
                "expected {} values for a {n} x {p} matrix, got {}",
                n * p,
                col_major.len()
            )));
        }
        if let Some(k) = col_major.iter().position(|v| !v.is_finite()) {
            return Err(Error::Cell {
                row: k % n,
                column: k / n,
                message: "non-finite value".into(),
            });
        }
        Ok(Self::raw(n, p, Storage::Dense(col_major)))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::data(format!("row {i} has {} fields, expected {p}", rows[i].len())));
        }
        let mut data = vec![0.0; n * p];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                data[j * n + i] = v;
            }
        }
        Self::dense(n, p, data)
    }

    /// Converts a row-major buffer (the layout most host languages hand over)
    /// into column-major storage. This is the only copy made.
    pub fn from_row_major(n: usize, p: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * p {
            return Err(Error::usage(format!(
                "feature buffer has {} values, expected {n} x {p}",
                values.len()
            )));
        }
        let mut data = vec![0.0; n * p];
        for i in 0..n {
            for j in 0..p {
                data[j * n + i] = values[i * p + j];
            }
        }
        Self::dense(n, p, data)
    }

    pub fn sparse(n: usize, p: usize, csc: CscMatrix) -> Result<Self> {
        check_shape(n, p)?;
        csc.validate(n, p)?;
        Ok(Self::raw(n, p, Storage::Sparse(csc)))
    }

    fn raw(n: usize, p: usize, storage: Storage) -> Self {
        DesignMatrix {
            n,
            p,
            storage,
            col_means: vec![0.0; p],
            col_scales: vec![1.0; p],
            offsets: vec![0.0; p],
            normalized: false,
        }
    }

    pub(crate) fn into_normalized(
        n: usize,
        p: usize,
        storage: Storage,
        col_means: Vec<f64>,
        col_scales: Vec<f64>,
        offsets: Vec<f64>,
    ) -> Self {
        DesignMatrix {
            n,
            p,
            storage,
            col_means,
            col_scales,
            offsets,
            normalized: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    /// Raw-scale column means recorded by normalization (zeros otherwise).
    pub fn col_means(&self) -> &[f64] {
        &self.col_means
    }

    /// Raw-scale population standard deviations recorded by normalization
    /// (ones otherwise).
    pub fn col_scales(&self) -> &[f64] {
        &self.col_scales
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let stored = match &self.storage {
            Storage::Dense(d) => d[j * self.n + i],
            Storage::Sparse(s) => {
                let (rows, vals) = s.column(j);
                rows.binary_search(&i).map_or(0.0, |k| vals[k])
            }
        };
        stored - self.offsets[j]
    }

    pub fn column_into(&self, j: usize, out: &mut [f64]) {
        match &self.storage {
            Storage::Dense(d) => out.copy_from_slice(&d[j * self.n..(j + 1) * self.n]),
            Storage::Sparse(s) => {
                out.fill(-self.offsets[j]);
                let (rows, vals) = s.column(j);
                for (&r, &v) in rows.iter().zip(vals) {
                    out[r] = v - self.offsets[j];
                }
                return;
            }
        }
        if self.offsets[j] != 0.0 {
            out.iter_mut().for_each(|x| *x -= self.offsets[j]);
        }
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.column_into(j, &mut out);
        out
    }

    pub fn dot_column(&self, j: usize, v: &[f64]) -> f64 {
        match &self.storage {
            Storage::Dense(d) => {
                let col = &d[j * self.n..(j + 1) * self.n];
                let raw: f64 = col.iter().zip(v).map(|(a, b)| a * b).sum();
                if self.offsets[j] == 0.0 {
                    raw
                } else {
                    raw - self.offsets[j] * v.iter().sum::<f64>()
                }
            }
            Storage::Sparse(s) => {
                let (rows, vals) = s.column(j);
                let raw: f64 = rows.iter().zip(vals).map(|(&r, &x)| x * v[r]).sum();
                if self.offsets[j] == 0.0 {
                    raw
                } else {
                    raw - self.offsets[j] * v.iter().sum::<f64>()
                }
            }
        }
    }

    /// `X^T v` over all columns.
    pub fn xt_dot(&self, v: &[f64]) -> Vec<f64> {
        let total: f64 = v.iter().sum();
        (0..self.p)
            .map(|j| {
                let raw = match &self.storage {
                    Storage::Dense(d) => d[j * self.n..(j + 1) * self.n]
                        .iter()
                        .zip(v)
                        .map(|(a, b)| a * b)
                        .sum::<f64>(),
                    Storage::Sparse(s) => {
                        let (rows, vals) = s.column(j);
                        rows.iter().zip(vals).map(|(&r, &x)| x * v[r]).sum::<f64>()
                    }
                };
                raw - self.offsets[j] * total
            })
            .collect()
    }

    /// `out += a * X[:, j]`
    pub fn axpy_column(&self, j: usize, a: f64, out: &mut [f64]) {
        match &self.storage {
            Storage::Dense(d) => {
                for (o, x) in out.iter_mut().zip(&d[j * self.n..(j + 1) * self.n]) {
                    *o += a * x;
                }
            }
            Storage::Sparse(s) => {
                let (rows, vals) = s.column(j);
                for (&r, &x) in rows.iter().zip(vals) {
                    out[r] += a * x;
                }
            }
        }
        if self.offsets[j] != 0.0 {
            let shift = a * self.offsets[j];
            out.iter_mut().for_each(|o| *o -= shift);
        }
    }

    /// `intercept + X beta`, touching only the nonzero coefficients.
    pub fn linear_predictor(&self, intercept: f64, beta: &[f64]) -> Vec<f64> {
        let mut eta = vec![intercept; self.n];
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                self.axpy_column(j, b, &mut eta);
            }
        }
        eta
    }

    /// Dense `n x cols.len()` copy of the selected columns.
    pub fn gather(&self, cols: &[usize]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, cols.len());
        for (k, &j) in cols.iter().enumerate() {
            self.column_into(j, m.column_mut(k).as_mut_slice());
        }
        m
    }

    /// Mean and population variance of the effective column `j`.
    pub fn column_stats(&self, j: usize) -> (f64, f64) {
        let col = self.column(j);
        let n = self.n as f64;
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        (mean, var)
    }

    /// Column subset, keeping normalization metadata.
    pub fn select_columns(&self, cols: &[usize]) -> DesignMatrix {
        let storage = match &self.storage {
            Storage::Dense(d) => {
                let mut out = Vec::with_capacity(self.n * cols.len());
                for &j in cols {
                    out.extend_from_slice(&d[j * self.n..(j + 1) * self.n]);
                }
                Storage::Dense(out)
            }
            Storage::Sparse(s) => {
                let mut col_ptr = vec![0];
                let mut row_idx = Vec::new();
                let mut values = Vec::new();
                for &j in cols {
                    let (r, v) = s.column(j);
                    row_idx.extend_from_slice(r);
                    values.extend_from_slice(v);
                    col_ptr.push(row_idx.len());
                }
                Storage::Sparse(CscMatrix {
                    col_ptr,
                    row_idx,
                    values,
                })
            }
        };
        let pick = |v: &[f64]| cols.iter().map(|&j| v[j]).collect::<Vec<_>>();
        DesignMatrix {
            n: self.n,
            p: cols.len(),
            storage,
            col_means: pick(&self.col_means),
            col_scales: pick(&self.col_scales),
            offsets: pick(&self.offsets),
            normalized: self.normalized,
        }
    }

    /// Row subset of a raw (unnormalized) matrix. Rows must be ascending.
    pub fn select_rows(&self, rows: &[usize]) -> Result<DesignMatrix> {
        if self.normalized {
            return Err(Error::usage("row subsets are taken from raw data only"));
        }
        check_shape(rows.len(), self.p)?;
        let m = rows.len();
        let storage = match &self.storage {
            Storage::Dense(d) => {
                let mut out = Vec::with_capacity(m * self.p);
                for j in 0..self.p {
                    let col = &d[j * self.n..(j + 1) * self.n];
                    out.extend(rows.iter().map(|&i| col[i]));
                }
                Storage::Dense(out)
            }
            Storage::Sparse(s) => {
                let mut new_index = vec![usize::MAX; self.n];
                for (k, &i) in rows.iter().enumerate() {
                    new_index[i] = k;
                }
                let mut col_ptr = vec![0];
                let mut row_idx = Vec::new();
                let mut values = Vec::new();
                for j in 0..self.p {
                    let (r, v) = s.column(j);
                    for (&i, &x) in r.iter().zip(v) {
                        if new_index[i] != usize::MAX {
                            row_idx.push(new_index[i]);
                            values.push(x);
                        }
                    }
                    col_ptr.push(row_idx.len());
                }
                Storage::Sparse(CscMatrix {
                    col_ptr,
                    row_idx,
                    values,
                })
            }
        };
        Ok(Self::raw(m, self.p, storage))
    }

    /// Dense copy with identical effective entries and metadata.
    pub fn to_dense(&self) -> DesignMatrix {
        let mut data = vec![0.0; self.n * self.p];
        for j in 0..self.p {
            self.column_into(j, &mut data[j * self.n..(j + 1) * self.n]);
        }
        DesignMatrix {
            n: self.n,
            p: self.p,
            storage: Storage::Dense(data),
            col_means: self.col_means.clone(),
            col_scales: self.col_scales.clone(),
            offsets: vec![0.0; self.p],
            normalized: self.normalized,
        }
    }

    /// Effective entries of row `i`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.p).map(|j| self.get(i, j)).collect()
    }
}

fn check_shape(n: usize, p: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::data(format!("need at least 2 samples, got {n}")));
    }
    if p < 1 {
        return Err(Error::data("need at least 1 predictor"));
    }
    Ok(())
}
