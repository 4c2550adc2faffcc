use rayon::prelude::*;

use crate::data::FoldAssignment;
use crate::engine::unpenalized_loss;
use crate::error::{Error, Result};
use crate::selection::path::{entries, resolve_support_sizes, solve_path};
use crate::selection::prepare::{prepare, Dataset, SelectionOptions};
use crate::selection::report::{Criterion, CvSummary, SelectionReport};

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub(crate) fn with_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads.map(|t| rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build()) {
        Some(Ok(pool)) => pool.install(f),
        _ => f(),
    }
}

/// Held-out losses of every support size for one fold; `None` marks a fit
/// that failed.
fn fold_losses(
    data: &Dataset,
    opts: &SelectionOptions,
    folds: &FoldAssignment,
    fold: usize,
    sizes: &[usize],
) -> Vec<Option<f64>> {
    let (train_rows, test_rows) = folds.split(fold);
    let run = || -> Result<Vec<Option<f64>>> {
        let train = data.select_rows(&train_rows)?;
        let prep = prepare(&train, opts)?;
        if sizes.last().is_some_and(|&s| s > prep.max_support()) {
            return Err(Error::usage("support size exceeds the screened problem"));
        }
        let test_x = data.x.select_rows(&test_rows)?;
        let test_y: Vec<f64> = test_rows.iter().map(|&i| data.y.values()[i]).collect();
        let fits = solve_path(&prep, opts, sizes);
        Ok(fits
            .iter()
            .map(|fit| {
                let (model, _) = fit.as_ref().ok()?;
                let (raw, intercept) = prep.back.to_raw(&model.beta, model.intercept);
                let mut beta = vec![0.0; data.p()];
                for (k, &j) in prep.columns.iter().enumerate() {
                    beta[j] = raw[k];
                }
                let eta = test_x.linear_predictor(intercept, &beta);
                Some(unpenalized_loss(data.y.family(), &test_y, &eta))
            })
            .collect())
    };
    run().unwrap_or_else(|_| vec![None; sizes.len()])
}

/// K-fold cross-validation over `s_list`.
///
/// Each fold normalizes and screens its training rows on its own, solves a
/// warm-started path and scores the unpenalized loss on the held-out rows.
/// Folds run in parallel and are merged in fold order, so the report does not
/// depend on the worker count. The chosen size minimizes the mean held-out
/// loss; the reported model is the full-data fit at that size.
pub fn cross_validate(
    data: &Dataset,
    opts: &SelectionOptions,
    s_list: Option<&[usize]>,
    folds: &FoldAssignment,
) -> Result<SelectionReport> {
    opts.splicing.validate()?;
    if folds.n() != data.n() {
        return Err(Error::usage(format!(
            "fold assignment covers {} samples, data has {}",
            folds.n(),
            data.n()
        )));
    }
    let prep = prepare(data, opts)?;
    let sizes = resolve_support_sizes(s_list, &prep)?;

    let per_fold: Vec<Vec<Option<f64>>> = with_pool(opts.threads, || {
        (0..folds.k())
            .into_par_iter()
            .map(|k| fold_losses(data, opts, folds, k, &sizes))
            .collect()
    });

    let fits = solve_path(&prep, opts, &sizes);
    let mut path = entries(&prep, &sizes, &fits);
    for (idx, entry) in path.iter_mut().enumerate() {
        let losses: Option<Vec<f64>> = per_fold.iter().map(|f| f[idx]).collect();
        entry.cv = losses.map(|l| summarize(l));
    }
    SelectionReport::assemble(
        data.y.family(),
        prep.n,
        prep.p,
        path,
        Criterion::Cv { folds: folds.k() },
        folds.seed(),
    )
}

fn summarize(fold_losses: Vec<f64>) -> CvSummary {
    let k = fold_losses.len() as f64;
    let mean = fold_losses.iter().sum::<f64>() / k;
    let var = if fold_losses.len() > 1 {
        fold_losses.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    CvSummary {
        mean,
        sd: var.sqrt(),
        fold_losses,
    }
}
