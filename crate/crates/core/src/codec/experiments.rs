use rand::Rng;
use serde::{Deserialize, Serialize};

use super::decode::{decode_ml_in, decode_threshold_in, nearest_codeword, DecodeStatus};
use super::enumerate::{Codebook, Constraint};
use crate::ensembles::CompoundCode;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::rng::trial_rng;
use crate::stats::{try_run_trials, MeanEstimate};

/// Uniformly random word of `book`, as `(y, x)`.
pub fn random_codeword<R: Rng + ?Sized>(
    code: &CompoundCode,
    constraint: &Constraint,
    rng: &mut R,
) -> Result<(BitVector, BitVector)> {
    let space = super::enumerate::information_space(code, constraint)?
        .ok_or_else(|| Error::InvalidParams("the selected coset is empty".into()))?;
    let mut y = space.offset.clone();
    for b in &space.basis {
        if rng.random::<bool>() {
            y ^= b;
        }
    }
    let x = code.encode(&y)?;
    Ok((y, x))
}

/// Per-trial result of lossy compression of a uniform source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdTrial {
    pub trial: u64,
    pub distortion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdSummary {
    pub trials: usize,
    pub distortion: MeanEstimate,
    pub rates: crate::ensembles::CodeRates,
    pub results: Vec<RdTrial>,
}

/// Quantizes `trials` uniform sources with the full code.
pub fn run_rd_batch(code: &CompoundCode, trials: usize, seed: u64) -> Result<RdSummary> {
    let book = Codebook::new(code, &Constraint::Full)?;
    let results = try_run_trials(trials, |i| {
        let mut rng = trial_rng(seed, i);
        let s = BitVector::random_uniform(code.n(), &mut rng);
        nearest_codeword(&book, &s).map(|r| RdTrial {
            trial: i,
            distortion: r.distortion,
        })
    })?;
    let d: Vec<f64> = results.iter().map(|r| r.distortion).collect();
    Ok(RdSummary {
        trials,
        distortion: MeanEstimate::from_samples(&d),
        rates: code.rates(),
        results,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelTrial {
    pub trial: u64,
    pub noise_weight: usize,
    pub threshold: DecodeStatus,
    pub ml: DecodeStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSummary {
    pub trials: usize,
    pub p: f64,
    pub threshold_error: MeanEstimate,
    pub threshold_erasure: MeanEstimate,
    pub ml_error: MeanEstimate,
    pub rates: crate::ensembles::CodeRates,
    pub results: Vec<ChannelTrial>,
}

/// Sends uniformly random codewords over a BSC(`p`) and decodes each with
/// both the threshold rule and maximum likelihood.
pub fn run_channel_batch(
    code: &CompoundCode,
    p: f64,
    epsilon_n: Option<f64>,
    trials: usize,
    seed: u64,
) -> Result<ChannelSummary> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::domain("p", p, "[0, 1/2]"));
    }
    let book = Codebook::new(code, &Constraint::Full)?;
    let results = try_run_trials(trials, |i| -> Result<ChannelTrial> {
        let mut rng = trial_rng(seed, i);
        let (_, x) = random_codeword(code, &Constraint::Full, &mut rng)?;
        let noise = BitVector::random(code.n(), p, &mut rng);
        let v = &x ^ &noise;
        let threshold = decode_threshold_in(&book, &v, p, epsilon_n)?.judge(&x).status;
        let ml = decode_ml_in(&book, &v)?.judge(&x).status;
        Ok(ChannelTrial {
            trial: i,
            noise_weight: noise.weight(),
            threshold,
            ml,
        })
    })?;
    Ok(ChannelSummary {
        trials,
        p,
        threshold_error: MeanEstimate::from_flags(results.iter().map(|r| r.threshold == DecodeStatus::Error)),
        threshold_erasure: MeanEstimate::from_flags(results.iter().map(|r| r.threshold == DecodeStatus::Erasure)),
        ml_error: MeanEstimate::from_flags(results.iter().map(|r| r.ml == DecodeStatus::Error)),
        rates: code.rates(),
        results,
    })
}
