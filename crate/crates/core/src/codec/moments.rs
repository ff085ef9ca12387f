use std::ops::ControlFlow;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::decode::distortion_radius;
use super::enumerate::{Codebook, Constraint};
use crate::ensembles::{CompoundCode, EnsembleParams};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::rng::{trial_rng, CodeRng};
use crate::stats::{try_run_trials, MeanEstimate};

/// Monte Carlo estimate of the first two moments of the number `T` of
/// information words whose codeword lies within `⌊D n⌋` of a uniform source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub trials: usize,
    pub mean_t: f64,
    pub se_t: f64,
    pub mean_t_squared: f64,
    pub se_t_squared: f64,
    /// Mean of `|C| · P0 · (1 + O)`, where `P0 = P[‖S‖ ≤ ⌊D n⌋]` and `O`
    /// counts nonzero information words that are good for a source drawn
    /// uniformly from the ball around the zero codeword. Unbiased for `E[T²]`.
    pub decomposition_rhs: f64,
    pub se_rhs: f64,
    /// `E[T] · (1 + E[O])`, the decomposition written with ensemble averages.
    pub product_form: f64,
    pub mean_overlap_count: f64,
    /// Standard error of the paired difference `T² − rhs`.
    pub se_difference: f64,
    /// `(mean T² − rhs) / se_difference`.
    pub z_score: f64,
    pub batch_size: usize,
    /// `mean T² ≥ (mean T)²` held within every batch.
    pub ordering_held_in_every_batch: bool,
}

struct Sample {
    t: f64,
    rhs: f64,
    overlap: f64,
}

/// Uniform word from the Hamming ball of radius `r` around zero.
pub fn sample_ball<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> BitVector {
    let weights: Vec<f64> = ln_binomials(n).into_iter().take(r + 1).collect();
    let max = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let probs: Vec<f64> = weights.iter().map(|w| (w - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut t = r;
    for (i, p) in probs.iter().enumerate() {
        if u < *p {
            t = i;
            break;
        }
        u -= p;
    }
    let support: Vec<usize> = sample_indices(rng, n, t).into_vec();
    BitVector::from_support(n, &support).expect("indices below n")
}

fn ln_binomials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += ((n - k + 1) as f64).ln() - (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `P[Bin(n, 1/2) ≤ r]`.
pub fn ball_probability(n: usize, r: usize) -> f64 {
    if r >= n {
        return 1.0;
    }
    let ln2n = n as f64 * std::f64::consts::LN_2;
    ln_binomials(n)
        .into_iter()
        .take(r + 1)
        .map(|l| (l - ln2n).exp())
        .sum::<f64>()
        .min(1.0)
}

fn count_within(book: &Codebook, s: &BitVector, r: usize) -> u64 {
    let mut count = 0;
    book.for_each::<()>(|_, x| {
        if x.distance(s) <= r {
            count += 1;
        }
        ControlFlow::Continue(())
    });
    count
}

fn one_trial(params: &EnsembleParams, d: f64, rng: &mut CodeRng) -> Result<Sample> {
    let code = CompoundCode::assemble(params, params.k, rng)?;
    let book = Codebook::new(&code, &Constraint::Full)?;
    let n = code.n();
    let r = distortion_radius(n, d);
    let s = BitVector::random_uniform(n, rng);
    let t = count_within(&book, &s, r) as f64;
    let conditioned = sample_ball(n, r, rng);
    // y = 0 is always good for a source inside the ball
    let overlap = (count_within(&book, &conditioned, r) - 1) as f64;
    let size = book.len() as f64;
    Ok(Sample {
        t,
        rhs: size * ball_probability(n, r) * (1.0 + overlap),
        overlap,
    })
}

/// Estimates `E[T]`, `E[T²]` and the second-moment decomposition over random
/// codes from `params` (all `k` checks active) and uniform sources, using
/// trial streams keyed by `params.seed`.
pub fn moment_experiment(params: &EnsembleParams, d: f64, trials: usize, batch_size: usize) -> Result<MomentEstimate> {
    params.validate()?;
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::domain("D", d, "[0, 1]"));
    }
    if batch_size == 0 {
        return Err(Error::InvalidParams("batch size must be positive".into()));
    }
    let samples = try_run_trials(trials, |i| one_trial(params, d, &mut trial_rng(params.seed, i)))?;
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let t2: Vec<f64> = t.iter().map(|x| x * x).collect();
    let rhs: Vec<f64> = samples.iter().map(|s| s.rhs).collect();
    let overlap: Vec<f64> = samples.iter().map(|s| s.overlap).collect();
    let diff: Vec<f64> = t2.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let (et, et2, erhs) = (
        MeanEstimate::from_samples(&t),
        MeanEstimate::from_samples(&t2),
        MeanEstimate::from_samples(&rhs),
    );
    let eo = MeanEstimate::from_samples(&overlap);
    let ediff = MeanEstimate::from_samples(&diff);
    let ordering = t.chunks(batch_size).all(|chunk| {
        let m = chunk.iter().sum::<f64>() / chunk.len() as f64;
        let m2 = chunk.iter().map(|x| x * x).sum::<f64>() / chunk.len() as f64;
        m2 >= m * m * (1.0 - 1e-12)
    });
    let z = if ediff.std_error > 0.0 {
        ediff.mean / ediff.std_error
    } else if ediff.mean == 0.0 {
        0.0
    } else {
        f64::INFINITY * ediff.mean.signum()
    };
    Ok(MomentEstimate {
        trials,
        mean_t: et.mean,
        se_t: et.std_error,
        mean_t_squared: et2.mean,
        se_t_squared: et2.std_error,
        decomposition_rhs: erhs.mean,
        se_rhs: erhs.std_error,
        product_form: et.mean * (1.0 + eo.mean),
        mean_overlap_count: eo.mean,
        se_difference: ediff.std_error,
        z_score: z,
        batch_size,
        ordering_held_in_every_batch: ordering,
    })
}
