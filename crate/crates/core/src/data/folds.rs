use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Assignment of each sample to one of `k` cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    k: usize,
    seed: u64,
}

impl FoldAssignment {
    pub fn fold_of(&self) -> &[usize] {
        &self.fold_of
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.fold_of.len()
    }

    /// Ascending (train, test) row indices for `fold`.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.fold_of.len()).partition(|&i| self.fold_of[i] != fold)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Seeded fold assignment.
///
/// Samples are shuffled (within each stratum when `strata` is given) and dealt
/// round-robin. A single counter runs across strata so fold sizes differ by at
/// most one overall and every stratum is spread as evenly as possible.
pub fn make_folds(
    n: usize,
    k: usize,
    seed: u64,
    strata: Option<&[usize]>,
) -> Result<FoldAssignment> {
    if k < 2 || k > n {
        return Err(Error::usage(format!("fold count {k} outside 2..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups: Vec<Vec<usize>> = match strata {
        Some(labels) => {
            if labels.len() != n {
                return Err(Error::usage("strata length does not match sample count"));
            }
            let classes = labels.iter().max().map_or(0, |m| m + 1);
            let mut g = vec![Vec::new(); classes];
            for (i, &c) in labels.iter().enumerate() {
                g[c].push(i);
            }
            g
        }
        None => vec![(0..n).collect()],
    };
    let mut fold_of = vec![0; n];
    let mut counter = 0;
    for mut members in groups {
        members.shuffle(&mut rng);
        for i in members {
            fold_of[i] = counter % k;
            counter += 1;
        }
    }
    Ok(FoldAssignment { fold_of, k, seed })
}
