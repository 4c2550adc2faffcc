use crate::data::matrix::DesignMatrix;
use crate::data::response::ResponseVector;
use crate::error::{Error, Result};

/// Default screening size `min(p, ceil(n / ln n))`.
pub fn default_screen_size(n: usize, p: usize) -> usize {
    let m = (n as f64 / (n as f64).ln()).ceil() as usize;
    m.clamp(1, p)
}

/// Marginal association scores `|X_j^T (y - ybar)| / n`.
pub fn marginal_scores(x: &DesignMatrix, y: &ResponseVector) -> Vec<f64> {
    let ybar = y.mean();
    let centered: Vec<f64> = y.values().iter().map(|v| v - ybar).collect();
    let n = x.n() as f64;
    x.xt_dot(&centered).into_iter().map(|s| s.abs() / n).collect()
}

/// Sure independence screening: the `m` columns with the largest marginal
/// scores, returned in ascending index order. Ties go to the lower index.
pub fn sis_screen(x: &DesignMatrix, y: &ResponseVector, m: usize) -> Result<Vec<usize>> {
    if m < 1 || m > x.p() {
        return Err(Error::usage(format!("screening size {m} outside 1..={}", x.p())));
    }
    let scores = marginal_scores(x, y);
    let mut order: Vec<usize> = (0..x.p()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut keep = order[..m].to_vec();
    keep.sort_unstable();
    Ok(keep)
}
