use serde::Serialize;

use crate::error::{Error, Result};
use crate::spca::covariance::CovarianceView;
use crate::spca::power::{apply_sign_convention, leading_eig};

/// Smallest eigenvalue gain that counts as an improvement.
pub const EV_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpcaConfig {
    /// Largest swap size; `None` means `min(s, 5)`.
    pub k_max: Option<usize>,
    pub max_splice_iter: usize,
}

impl Default for SpcaConfig {
    fn default() -> Self {
        SpcaConfig {
            k_max: None,
            max_splice_iter: 20,
        }
    }
}

/// Unit loading with exactly `s` nonzero entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseLoading {
    /// Ascending.
    pub support: Vec<usize>,
    /// Length p, zero off the support, largest-magnitude entry positive.
    pub loading: Vec<f64>,
    /// `v^T S v`.
    pub explained_variance: f64,
    /// False when a splice cap or an eigensolver cap was hit.
    pub converged: bool,
    /// Leading eigenvalue of every accepted support, starting with the
    /// initial one; strictly increasing.
    pub trace: Vec<f64>,
}

struct EigCache<'a> {
    cov: &'a CovarianceView,
    all_converged: bool,
}

impl EigCache<'_> {
    /// Leading eigenvalue of `S` restricted to the sorted set `idx`.
    fn value(&mut self, idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return 0.0;
        }
        let e = leading_eig(&self.cov.principal(idx), idx.len());
        self.all_converged &= e.converged;
        e.value
    }

    fn without(&mut self, set: &[usize], j: usize) -> f64 {
        let rest: Vec<usize> = set.iter().copied().filter(|&i| i != j).collect();
        self.value(&rest)
    }

    fn with(&mut self, set: &[usize], j: usize) -> f64 {
        let mut more = set.to_vec();
        let pos = more.partition_point(|&i| i < j);
        more.insert(pos, j);
        self.value(&more)
    }
}

/// Indices of `scores` ordered by value, ties to the lower index.
fn order(scores: &[(usize, f64)], descending: bool) -> Vec<usize> {
    let mut v = scores.to_vec();
    v.sort_by(|a, b| {
        let c = if descending { b.1.total_cmp(&a.1) } else { a.1.total_cmp(&b.1) };
        c.then(a.0.cmp(&b.0))
    });
    v.into_iter().map(|(j, _)| j).collect()
}

fn inactive(p: usize, active: &[usize]) -> Vec<usize> {
    (0..p).filter(|j| active.binary_search(j).is_err()).collect()
}

/// Grows or shrinks `start` to size `s` greedily by exact eigenvalue gains.
fn adapt(cache: &mut EigCache, start: &[usize], s: usize) -> Vec<usize> {
    let p = cache.cov.p();
    let mut set: Vec<usize> = start.iter().copied().filter(|&j| j < p).collect();
    set.sort_unstable();
    set.dedup();
    while set.len() > s {
        let scores: Vec<(usize, f64)> = set.iter().map(|&j| (j, -cache.without(&set, j))).collect();
        let drop = order(&scores, false)[0];
        set.retain(|&j| j != drop);
    }
    while set.len() < s {
        let scores: Vec<(usize, f64)> = inactive(p, &set).into_iter().map(|j| (j, cache.with(&set, j))).collect();
        let add = order(&scores, true)[0];
        let pos = set.partition_point(|&i| i < add);
        set.insert(pos, add);
    }
    set
}

/// The best exchange of one active for one inactive column, if it raises the
/// leading eigenvalue by more than `EV_TOL` (ties: lowest pair).
fn best_single_swap(
    cache: &mut EigCache,
    active: &[usize],
    outside: &[usize],
    lambda: f64,
) -> Option<(Vec<usize>, f64)> {
    let mut best: Option<(Vec<usize>, f64)> = None;
    for &out in active {
        for &inn in outside {
            let mut candidate: Vec<usize> = active.iter().copied().filter(|&j| j != out).collect();
            let pos = candidate.partition_point(|&i| i < inn);
            candidate.insert(pos, inn);
            let value = cache.value(&candidate);
            if value > lambda + EV_TOL && best.as_ref().is_none_or(|(_, b)| value > *b) {
                best = Some((candidate, value));
            }
        }
    }
    best
}

/// Cardinality-`s` leading sparse loading by splicing over supports.
///
/// Starts from the `s` largest diagonal entries (ties: lower index), or from
/// `warm` grown/shrunk greedily to size `s`. Each pass scores every active
/// column by the eigenvalue lost when it leaves and every inactive column by
/// the eigenvalue gained when it joins, then tries swapping the `k` worst
/// active for the `k` best inactive columns for `k = 1..=k_max`, accepting the
/// first swap that raises the leading eigenvalue by more than `1e-10`. When
/// none does, every single exchange is tried and the best improving one is
/// taken, so the result admits no improving one-for-one exchange.
pub fn spca_fixed_support(
    cov: &CovarianceView,
    s: usize,
    config: &SpcaConfig,
    warm: Option<&[usize]>,
) -> Result<SparseLoading> {
    let p = cov.p();
    if s == 0 || s > p {
        return Err(Error::usage(format!("cardinality {s} outside 1..={p}")));
    }
    if config.k_max == Some(0) {
        return Err(Error::usage("k_max must be at least 1"));
    }
    let mut cache = EigCache {
        cov,
        all_converged: true,
    };
    let mut active = match warm {
        Some(w) => adapt(&mut cache, w, s),
        None => {
            let diag: Vec<(usize, f64)> = cov.diagonal().into_iter().enumerate().collect();
            let mut top = order(&diag, true);
            top.truncate(s);
            top.sort_unstable();
            top
        }
    };
    let k_max = config.k_max.unwrap_or(5).min(s).min(p - s);
    let mut lambda = cache.value(&active);
    let mut trace = vec![lambda];
    let mut capped = true;
    for _ in 0..config.max_splice_iter {
        let outside = inactive(p, &active);
        let xi: Vec<(usize, f64)> = active.iter().map(|&j| (j, lambda - cache.without(&active, j))).collect();
        let zeta: Vec<(usize, f64)> = outside.iter().map(|&j| (j, cache.with(&active, j) - lambda)).collect();
        let drop_order = order(&xi, false);
        let add_order = order(&zeta, true);
        let mut improved = false;
        for k in 1..=k_max {
            let mut candidate: Vec<usize> = active
                .iter()
                .copied()
                .filter(|j| !drop_order[..k].contains(j))
                .chain(add_order[..k].iter().copied())
                .collect();
            candidate.sort_unstable();
            let value = cache.value(&candidate);
            if value > lambda + EV_TOL {
                active = candidate;
                lambda = value;
                trace.push(value);
                improved = true;
                break;
            }
        }
        if !improved {
            if let Some((candidate, value)) = best_single_swap(&mut cache, &active, &outside, lambda) {
                active = candidate;
                lambda = value;
                trace.push(value);
                continue;
            }
            capped = false;
            break;
        }
    }

    let e = leading_eig(&cov.principal(&active), active.len());
    let mut loading = vec![0.0; p];
    for (&j, &v) in active.iter().zip(&e.vector) {
        loading[j] = v;
    }
    apply_sign_convention(&mut loading);
    Ok(SparseLoading {
        explained_variance: cov.quadratic_form(&loading),
        support: active,
        loading,
        converged: !capped && cache.all_converged && e.converged,
        trace,
    })
}

/// Loadings along `s_list` with the explained-variance curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpcaPath {
    pub loadings: Vec<SparseLoading>,
    pub ev_curve: Vec<f64>,
}

/// Solves every cardinality in `s_list` (strictly ascending within `1..=p`).
///
/// Each size is first solved cold and warm from the previous size. A downward
/// sweep then re-solves each size warm from the next larger one, and a final
/// upward sweep re-solves each warm from the next smaller one. A re-solve
/// replaces the current loading only if it explains strictly more variance, so
/// the curve is nondecreasing and never below an independent cold solve.
pub fn spca_path(cov: &CovarianceView, s_list: &[usize], config: &SpcaConfig) -> Result<SpcaPath> {
    if s_list.is_empty() || s_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage("cardinalities must be non-empty and strictly ascending"));
    }
    let mut loadings: Vec<SparseLoading> = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let cold = spca_fixed_support(cov, s, config, None)?;
        loadings.push(cold);
        if let [.., prev, cur] = loadings.as_mut_slice() {
            improve_from(cov, config, cur, &prev.support)?;
        }
    }
    for i in (0..loadings.len().saturating_sub(1)).rev() {
        let (lower, upper) = loadings.split_at_mut(i + 1);
        improve_from(cov, config, &mut lower[i], &upper[0].support)?;
    }
    for i in 1..loadings.len() {
        let (lower, upper) = loadings.split_at_mut(i);
        improve_from(cov, config, &mut upper[0], &lower[i - 1].support)?;
    }
    let ev_curve = loadings.iter().map(|l| l.explained_variance).collect();
    Ok(SpcaPath { loadings, ev_curve })
}

/// Re-solves `current` warm from `start`, keeping the result if it is better.
fn improve_from(
    cov: &CovarianceView,
    config: &SpcaConfig,
    current: &mut SparseLoading,
    start: &[usize],
) -> Result<()> {
    let warm = spca_fixed_support(cov, current.support.len(), config, Some(start))?;
    if warm.explained_variance > current.explained_variance {
        *current = warm;
    }
    Ok(())
}

/// `count` loadings of cardinality `s`, each found on the covariance deflated
/// by all earlier ones. Explained variances refer to the deflated matrices.
pub fn spca_components(
    cov: &CovarianceView,
    s: usize,
    count: usize,
    config: &SpcaConfig,
) -> Result<Vec<SparseLoading>> {
    let mut current = cov.clone();
    let mut out = Vec::with_capacity(count);
    for c in 0..count {
        let loading = spca_fixed_support(&current, s, config, None)?;
        if c + 1 < count {
            current = current.deflate(&loading.loading)?;
        }
        out.push(loading);
    }
    Ok(out)
}
