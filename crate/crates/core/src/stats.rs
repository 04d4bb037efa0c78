//! Parametric Poisson bootstrap over coincidence counts.

use std::fmt::Display;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{poisson, CountMatrix};

pub const DEFAULT_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub mean: f64,
    /// Sample standard deviation over resamples.
    pub std: f64,
    pub n_resamples: usize,
    pub seed: u64,
}

/// Every count `N` replaced by an independent `Poisson(N)` draw.
pub fn resample(counts: &[CountMatrix], rng: &mut ChaCha8Rng) -> Vec<CountMatrix> {
    counts
        .iter()
        .map(|c| c.with_counts(c.counts().map(|n| poisson(n as f64, rng))))
        .collect()
}

/// Re-evaluates `estimator` on `n_resamples` Poisson resamplings of the
/// counts. Resample `i` draws from stream `i` of a generator seeded with
/// `seed`, so the result does not depend on thread scheduling.
pub fn poisson_bootstrap<F, E>(
    counts: &[CountMatrix],
    estimator: F,
    n_resamples: usize,
    seed: u64,
) -> Result<BootstrapResult>
where
    F: Fn(&[CountMatrix]) -> std::result::Result<f64, E> + Sync,
    E: Display,
{
    if n_resamples < 2 {
        return Err(Error::InvalidParameter(format!(
            "bootstrap needs at least 2 resamples, got {n_resamples}"
        )));
    }
    let values: Vec<std::result::Result<f64, String>> = (0..n_resamples)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            estimator(&resample(counts, &mut rng)).map_err(|e| e.to_string())
        })
        .collect();
    let mut samples = Vec::with_capacity(n_resamples);
    for (index, v) in values.into_iter().enumerate() {
        samples.push(v.map_err(|message| Error::Resample { index, message })?);
    }
    // shifted sums keep a constant estimator exactly constant
    let n = samples.len() as f64;
    let shift = samples[0];
    let (s1, s2) = samples
        .iter()
        .fold((0.0, 0.0), |(a, b), x| (a + (x - shift), b + (x - shift).powi(2)));
    let mean = shift + s1 / n;
    let var = ((s2 - s1 * s1 / n) / (n - 1.0)).max(0.0);
    Ok(BootstrapResult {
        mean,
        std: var.sqrt(),
        n_resamples,
        seed,
    })
}
