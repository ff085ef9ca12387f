//! Monte Carlo plumbing: ordered parallel trials and mean estimates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Runs `trial(i)` for `i in 0..trials` on the current rayon pool and returns
/// the results in trial order, so any later reduction is independent of the
/// thread count.
pub fn run_trials<T: Send>(trials: usize, trial: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..trials as u64).into_par_iter().map(trial).collect()
}

/// Like [`run_trials`] but stops at the first error (in trial order).
pub fn try_run_trials<T: Send, E: Send>(
    trials: usize,
    trial: impl Fn(u64) -> Result<T, E> + Sync + Send,
) -> Result<Vec<T>, E> {
    run_trials(trials, trial).into_iter().collect()
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl MeanEstimate {
    /// Summed left to right; an empty slice gives mean and error 0.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return MeanEstimate {
                mean: 0.0,
                std_error: 0.0,
                samples: 0,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        MeanEstimate {
            mean,
            std_error,
            samples: n,
        }
    }

    pub fn from_flags(flags: impl IntoIterator<Item = bool>) -> Self {
        let xs: Vec<f64> = flags.into_iter().map(|b| b as u8 as f64).collect();
        Self::from_samples(&xs)
    }
}
