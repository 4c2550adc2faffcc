use std::time::Instant;

use crate::engine::{solve_fixed_support, ActiveModel, Problem, SplicingConfig};
use crate::error::{Error, Result};
use crate::selection::criterion::IcKind;
use crate::selection::prepare::{prepare, Dataset, Prepared, SelectionOptions};
use crate::selection::report::{Criterion, PathEntry, SelectionReport};

/// `0..=min(G, ceil(n / ln n), 100)` with `G` the selectable group count.
pub fn default_support_sizes(n: usize, selectable: usize) -> Vec<usize> {
    let cap = (n as f64 / (n as f64).ln()).ceil() as usize;
    (0..=selectable.min(cap).min(100)).collect()
}

pub(crate) fn resolve_support_sizes(s_list: Option<&[usize]>, prep: &Prepared) -> Result<Vec<usize>> {
    let Some(list) = s_list else {
        return Ok(default_support_sizes(prep.n, prep.max_support()));
    };
    if list.is_empty() {
        return Err(Error::usage("support size list is empty"));
    }
    if list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage("support sizes must be strictly ascending"));
    }
    if let Some(&s) = list.iter().find(|&&s| s > prep.max_support()) {
        return Err(Error::usage(format!(
            "support size {s} exceeds the {} selectable groups",
            prep.max_support()
        )));
    }
    Ok(list.to_vec())
}

/// Outcome of one support size: the model and its solve time, or the error.
pub(crate) type PathFit = std::result::Result<(ActiveModel, f64), String>;

/// Solves from `warm` and from a cold start and keeps the lower loss (the
/// warm solution on ties), so a warm start never ends worse than a cold one.
pub(crate) fn solve_warm_or_cold(
    problem: &Problem<'_>,
    config: &SplicingConfig,
    warm: Option<&ActiveModel>,
) -> Result<ActiveModel> {
    let cold = solve_fixed_support(problem, config, None);
    let Some(warm) = warm else {
        return cold;
    };
    match (solve_fixed_support(problem, config, Some(warm)), cold) {
        (Ok(w), Ok(c)) => Ok(if c.loss < w.loss { c } else { w }),
        (Ok(w), Err(_)) => Ok(w),
        (Err(_), Ok(c)) => Ok(c),
        (Err(e), Err(_)) => Err(e),
    }
}

/// Solves every support size in order, warm-starting each from the last
/// successful solution.
pub(crate) fn solve_path(prep: &Prepared, opts: &SelectionOptions, sizes: &[usize]) -> Vec<PathFit> {
    let problem = prep.problem();
    let mut warm: Option<ActiveModel> = None;
    sizes
        .iter()
        .map(|&s| {
            let start = Instant::now();
            let config = opts.splicing.with_support_size(s);
            match solve_warm_or_cold(&problem, &config, warm.as_ref()) {
                Ok(model) => {
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    warm = Some(model.clone());
                    Ok((model, ms))
                }
                Err(e) => {
                    warm = None;
                    Err(e.to_string())
                }
            }
        })
        .collect()
}

pub(crate) fn entries(prep: &Prepared, sizes: &[usize], fits: &[PathFit]) -> Vec<PathEntry> {
    sizes
        .iter()
        .zip(fits)
        .map(|(&s, fit)| match fit {
            Ok((model, ms)) => prep.entry(s, model, *ms),
            Err(msg) => PathEntry::failed(s, msg.clone()),
        })
        .collect()
}

/// Warm-started path over `s_list` (ascending), tuned by an information
/// criterion. Coefficients are reported on the raw scale.
pub fn path_search(
    data: &Dataset,
    opts: &SelectionOptions,
    s_list: Option<&[usize]>,
    criterion: IcKind,
) -> Result<SelectionReport> {
    opts.splicing.validate()?;
    let prep = prepare(data, opts)?;
    let sizes = resolve_support_sizes(s_list, &prep)?;
    let fits = solve_path(&prep, opts, &sizes);
    SelectionReport::assemble(
        data.y.family(),
        prep.n,
        prep.p,
        entries(&prep, &sizes, &fits),
        Criterion::Ic { ic: criterion },
        opts.splicing.seed,
    )
}
