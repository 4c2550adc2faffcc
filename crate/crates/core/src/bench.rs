//! Repeated train/test benchmarking of the tuned estimator.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::Family;
use crate::error::{Error, Result};
use crate::selection::{select, Dataset, SelectionOptions, Tuning};

/// Area under the ROC curve by the Mann-Whitney statistic, with midranks for
/// tied scores. `None` when either class is absent.
pub fn auc(scores: &[f64], labels: &[f64]) -> Option<f64> {
    assert_eq!(scores.len(), labels.len(), "scores and labels differ in length");
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = mid;
        }
        i = j + 1;
    }
    let n_pos = labels.iter().filter(|&&l| l == 1.0).count() as f64;
    let n_neg = labels.len() as f64 - n_pos;
    if n_pos == 0.0 || n_neg == 0.0 {
        return None;
    }
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l == 1.0).map(|(r, _)| r).sum();
    Some((rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchProtocol {
    /// Fraction of samples held out per repetition.
    pub test_fraction: f64,
    pub repetitions: usize,
    pub seed: u64,
    /// Support-size tuning applied to every training split. A `Cv` seed is
    /// offset by the repetition index.
    pub tuning: Tuning,
    pub options: SelectionOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub repetition: usize,
    /// Test MSE for gaussian and poisson (on the mean scale), AUC for logistic.
    pub metric: f64,
    pub nnz: usize,
    pub chosen_s: usize,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchTable {
    pub metric_name: String,
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    pub fn mean_metric(&self) -> f64 {
        mean(self.rows.iter().map(|r| r.metric))
    }

    pub fn mean_nnz(&self) -> f64 {
        mean(self.rows.iter().map(|r| r.nnz as f64))
    }

    pub fn mean_runtime_ms(&self) -> f64 {
        mean(self.rows.iter().map(|r| r.runtime_ms))
    }

    pub fn without_timing(mut self) -> Self {
        self.rows.iter_mut().for_each(|r| r.runtime_ms = 0.0);
        self
    }

    /// One line per repetition plus a final `mean` line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("repetition,{},nnz,runtime_ms\n", self.metric_name);
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.repetition, r.metric, r.nnz, r.runtime_ms));
        }
        out.push_str(&format!(
            "mean,{},{},{}\n",
            self.mean_metric(),
            self.mean_nnz(),
            self.mean_runtime_ms()
        ));
        out
    }
}

fn mean(it: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = it.len();
    it.sum::<f64>() / n as f64
}

pub fn metric_name(family: Family) -> &'static str {
    match family {
        Family::Logistic => "auc",
        Family::Gaussian | Family::Poisson => "mse",
    }
}

/// Seeded train/test split; logistic responses are split within each class.
pub fn train_test_split(data: &Dataset, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::usage(format!("test fraction {test_fraction} outside (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let strata: Vec<Vec<usize>> = match data.y.strata() {
        Some(labels) => {
            let mut g = vec![Vec::new(); 2];
            for (i, c) in labels.into_iter().enumerate() {
                g[c].push(i);
            }
            g
        }
        None => vec![(0..data.n()).collect()],
    };
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for mut members in strata {
        members.shuffle(&mut rng);
        let n_test = (members.len() as f64 * test_fraction).round() as usize;
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    if train.len() < 2 || test.is_empty() {
        return Err(Error::usage("split leaves too few training or test samples"));
    }
    Ok((train, test))
}

/// Runs the protocol: per repetition, split, tune on the training rows and
/// score the chosen model on the held-out rows.
pub fn run_bench(data: &Dataset, protocol: &BenchProtocol) -> Result<BenchTable> {
    if protocol.repetitions == 0 {
        return Err(Error::usage("at least one repetition is required"));
    }
    let family = data.y.family();
    let mut rows = Vec::with_capacity(protocol.repetitions);
    for rep in 0..protocol.repetitions {
        let split_seed = protocol.seed.wrapping_add(rep as u64);
        let (train_rows, test_rows) = train_test_split(data, protocol.test_fraction, split_seed)?;
        let train = data.select_rows(&train_rows)?;
        let tuning = match &protocol.tuning {
            Tuning::Cv { s_list, folds, seed } => Tuning::Cv {
                s_list: s_list.clone(),
                folds: *folds,
                seed: seed.wrapping_add(rep as u64),
            },
            t => t.clone(),
        };
        let start = Instant::now();
        let report = select(&train, &protocol.options, &tuning)?;
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

        let test_x = data.x.select_rows(&test_rows)?;
        let test_y: Vec<f64> = test_rows.iter().map(|&i| data.y.values()[i]).collect();
        let eta = test_x.linear_predictor(report.intercept(), &report.coefficients());
        let metric = match family {
            Family::Logistic => auc(&eta, &test_y)
                .ok_or_else(|| Error::data("test split lacks one of the two classes"))?,
            Family::Gaussian | Family::Poisson => {
                let sse: f64 = eta.iter().zip(&test_y).map(|(&e, &y)| (family.mean(e) - y).powi(2)).sum();
                sse / test_y.len() as f64
            }
        };
        rows.push(BenchRow {
            repetition: rep,
            metric,
            nnz: report.chosen().selected.len(),
            chosen_s: report.chosen_s,
            runtime_ms,
        });
    }
    Ok(BenchTable {
        metric_name: metric_name(family).to_string(),
        rows,
    })
}
