use std::collections::BTreeMap;
use std::time::Instant;

use crate::engine::ActiveModel;
use crate::error::{Error, Result};
use crate::selection::criterion::IcKind;
use crate::selection::path::solve_warm_or_cold;
use crate::selection::prepare::{prepare, Dataset, SelectionOptions};
use crate::selection::report::{Criterion, PathEntry, SelectionReport};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization over the integers `lo..=hi`.
///
/// `eval` is called at most once per integer; `None` counts as +inf. Returns
/// the minimizer (ties: smallest) and the probe log in call order. For a
/// unimodal objective the minimizer equals the exhaustive argmin.
pub fn golden_section_min<F>(lo: usize, hi: usize, mut eval: F) -> (Option<usize>, Vec<usize>)
where
    F: FnMut(usize) -> Option<f64>,
{
    let mut memo: BTreeMap<usize, f64> = BTreeMap::new();
    let mut probes = Vec::new();
    let mut f = |s: usize, memo: &mut BTreeMap<usize, f64>| -> f64 {
        *memo.entry(s).or_insert_with(|| {
            probes.push(s);
            eval(s).filter(|v| !v.is_nan()).unwrap_or(f64::INFINITY)
        })
    };

    let (mut a, mut b) = (lo, hi);
    while b - a > 3 {
        let width = (b - a) as f64;
        let c = b - (width * INV_PHI).round() as usize;
        let mut d = a + (width * INV_PHI).round() as usize;
        if d <= c {
            d = c + 1;
        }
        if f(c, &mut memo) <= f(d, &mut memo) {
            b = d;
        } else {
            a = c;
        }
    }
    let mut best: Option<(usize, f64)> = None;
    for s in a..=b {
        let v = f(s, &mut memo);
        if v.is_finite() && best.is_none_or(|(_, bv)| v < bv) {
            best = Some((s, v));
        }
    }
    (best.map(|(s, _)| s), probes)
}

/// Golden-section tuning of the support size by an information criterion.
///
/// Each probed size is solved once, warm-started from the closest smaller
/// size already solved. The report lists the probed sizes only.
pub fn gsection_search(
    data: &Dataset,
    opts: &SelectionOptions,
    s_min: usize,
    s_max: usize,
    criterion: IcKind,
) -> Result<SelectionReport> {
    opts.splicing.validate()?;
    let prep = prepare(data, opts)?;
    if s_min >= s_max || s_max > prep.max_support() {
        return Err(Error::usage(format!(
            "golden-section range [{s_min}, {s_max}] must satisfy s_min < s_max <= {}",
            prep.max_support()
        )));
    }
    let problem = prep.problem();
    let mut models: BTreeMap<usize, ActiveModel> = BTreeMap::new();
    let mut path: Vec<PathEntry> = Vec::new();

    let (_, _) = golden_section_min(s_min, s_max, |s| {
        let warm = models.range(..s).next_back().map(|(_, m)| m.clone());
        let start = Instant::now();
        let entry = match solve_warm_or_cold(&problem, &opts.splicing.with_support_size(s), warm.as_ref()) {
            Ok(model) => {
                let e = prep.entry(s, &model, start.elapsed().as_secs_f64() * 1e3);
                models.insert(s, model);
                e
            }
            Err(err) => PathEntry::failed(s, err.to_string()),
        };
        let score = entry.score(Criterion::Ic { ic: criterion });
        path.push(entry);
        score
    });

    SelectionReport::assemble(
        data.y.family(),
        prep.n,
        prep.p,
        path,
        Criterion::Ic { ic: criterion },
        opts.splicing.seed,
    )
}
