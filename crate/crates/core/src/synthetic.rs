//! Seeded simulation of sparse GLM data and random covariance matrices.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::data::{DesignMatrix, ResponseVector};
use crate::engine::Family;
use crate::error::{Error, Result};

/// Simulated data with its ground truth.
#[derive(Debug, Clone)]
pub struct Simulated {
    pub x: DesignMatrix,
    pub y: ResponseVector,
    pub beta: Vec<f64>,
    pub intercept: f64,
}

impl Simulated {
    /// Indices of the nonzero true coefficients.
    pub fn support(&self) -> Vec<usize> {
        (0..self.beta.len()).filter(|&j| self.beta[j] != 0.0).collect()
    }
}

/// Length-`p` coefficients with `s` nonzeros at random positions, each
/// `±U(lo, hi)` with a random sign.
pub fn random_sparse_beta(p: usize, s: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..p).collect();
    idx.shuffle(rng);
    let mut beta = vec![0.0; p];
    for &j in idx.iter().take(s.min(p)) {
        let m = rng.random_range(lo..hi);
        beta[j] = if rng.random_bool(0.5) { m } else { -m };
    }
    beta
}

/// Column-major `n x p` matrix of iid standard normals.
pub fn standard_normal_design(n: usize, p: usize, rng: &mut impl Rng) -> Result<DesignMatrix> {
    let values: Vec<f64> = (0..n * p).map(|_| rng.sample(StandardNormal)).collect();
    DesignMatrix::dense(n, p, values)
}

/// Draws `y` given a design and true coefficients.
///
/// Gaussian adds `N(0, noise_sd^2)` noise; logistic draws Bernoulli(sigmoid(eta));
/// poisson draws Poisson(exp(eta)). `noise_sd` is ignored for the latter two.
pub fn simulate_response(
    family: Family,
    x: &DesignMatrix,
    beta: &[f64],
    intercept: f64,
    noise_sd: f64,
    rng: &mut impl Rng,
) -> Result<ResponseVector> {
    let eta = x.linear_predictor(intercept, beta);
    let values: Vec<f64> = match family {
        Family::Gaussian => eta
            .iter()
            .map(|&e| e + noise_sd * rng.sample::<f64, _>(StandardNormal))
            .collect(),
        Family::Logistic => eta
            .iter()
            .map(|&e| f64::from(u8::from(rng.random::<f64>() < family.mean(e))))
            .collect(),
        Family::Poisson => eta
            .iter()
            .map(|&e| {
                let mu = family.mean(e).max(1e-12);
                Poisson::new(mu)
                    .map(|d| d.sample(rng))
                    .map_err(|e| Error::Numerical(format!("poisson mean {mu}: {e}")))
            })
            .collect::<Result<_>>()?,
    };
    ResponseVector::new(values, family)
}

/// Standard-normal design with response drawn from `family` around `beta`.
pub fn simulate(
    family: Family,
    n: usize,
    beta: &[f64],
    intercept: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<Simulated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = standard_normal_design(n, beta.len(), &mut rng)?;
    let y = simulate_response(family, &x, beta, intercept, noise_sd, &mut rng)?;
    Ok(Simulated {
        x,
        y,
        beta: beta.to_vec(),
        intercept,
    })
}

/// `beta` of length `p` with the listed `(index, value)` entries.
pub fn beta_from_entries(p: usize, entries: &[(usize, f64)]) -> Vec<f64> {
    let mut beta = vec![0.0; p];
    for &(j, v) in entries {
        beta[j] = v;
    }
    beta
}

/// Random `p x p` PSD matrix `G G^T / p` with iid standard-normal `G`,
/// returned as rows.
pub fn random_psd(p: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<f64> = (0..p * p).map(|_| rng.sample(StandardNormal)).collect();
    (0..p)
        .map(|i| {
            (0..p)
                .map(|j| (0..p).map(|k| g[i * p + k] * g[j * p + k]).sum::<f64>() / p as f64)
                .collect()
        })
        .collect()
}
