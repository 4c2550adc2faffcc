//! Support-size tuning: warm-started paths scored by information criteria or
//! cross-validation, plus golden-section search over the support size.

pub mod criterion;
pub mod cv;
pub mod gsection;
pub mod path;
pub mod prepare;
pub mod report;

pub use criterion::{deviance, deviance_from_eta, information_criterion, serialize_real, IcKind, IcValues};
pub use cv::cross_validate;
pub use gsection::{golden_section_min, gsection_search};
pub use path::{default_support_sizes, path_search};
pub use prepare::{Dataset, ScreenSize, SelectionOptions};
pub use report::{argmin, Criterion, CvSummary, PathEntry, SelectionReport};

use crate::data::make_folds;
use crate::error::Result;

/// How the support size is determined.
#[derive(Debug, Clone, PartialEq)]
pub enum Tuning {
    /// A single support size.
    Fixed(usize),
    /// Information-criterion path; golden-section search over the range of
    /// `s_list` when `gsection` is set.
    Path {
        s_list: Option<Vec<usize>>,
        criterion: IcKind,
        gsection: bool,
    },
    Cv {
        s_list: Option<Vec<usize>>,
        folds: usize,
        seed: u64,
    },
}

/// Dispatches to the tuning routine named by `tuning`.
pub fn select(data: &Dataset, opts: &SelectionOptions, tuning: &Tuning) -> Result<SelectionReport> {
    match tuning {
        Tuning::Fixed(s) => path_search(data, opts, Some(&[*s]), IcKind::Gic),
        Tuning::Path {
            s_list,
            criterion,
            gsection: true,
        } => {
            let (lo, hi) = match s_list.as_deref() {
                Some([first, .., last]) => (*first, *last),
                _ => {
                    let prep = prepare::prepare(data, opts)?;
                    let sizes = default_support_sizes(prep.n, prep.max_support());
                    (0, *sizes.last().unwrap_or(&0))
                }
            };
            gsection_search(data, opts, lo, hi, *criterion)
        }
        Tuning::Path {
            s_list, criterion, ..
        } => path_search(data, opts, s_list.as_deref(), *criterion),
        Tuning::Cv {
            s_list,
            folds,
            seed,
        } => {
            let strata = data.y.strata();
            let assignment = make_folds(data.n(), *folds, *seed, strata.as_deref())?;
            cross_validate(data, opts, s_list.as_deref(), &assignment)
        }
    }
}
