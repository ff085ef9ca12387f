use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::enumerate::{Codebook, Constraint};
use crate::ensembles::CompoundCode;
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Closest admissible codeword to a source word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceEncodeResult {
    pub y_hat: BitVector,
    pub x_hat: BitVector,
    /// Hamming distance to the source.
    pub distance: usize,
    /// `distance / n`.
    pub distortion: f64,
}

fn check_len(what: &'static str, v: &BitVector, n: usize) -> Result<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context: what,
            expected: n,
            found: v.len(),
        })
    }
}

/// Nearest codeword in `book`; ties go to the first in enumeration order.
pub fn nearest_codeword(book: &Codebook, target: &BitVector) -> Result<SourceEncodeResult> {
    check_len("target word", target, book.blocklength())?;
    if book.is_empty() {
        return Err(Error::InvalidParams("the selected coset is empty".into()));
    }
    let mut best: Option<(usize, BitVector, BitVector)> = None;
    book.for_each(|y, x| {
        let dist = x.distance(target);
        if best.as_ref().is_none_or(|b| dist < b.0) {
            best = Some((dist, y.clone(), x.clone()));
            if dist == 0 {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    let (distance, y_hat, x_hat) = best.expect("non-empty codebook");
    Ok(SourceEncodeResult {
        distortion: distance as f64 / target.len() as f64,
        distance,
        y_hat,
        x_hat,
    })
}

/// Minimum-distortion quantization of `s` over the admissible codewords.
pub fn source_encode_exhaustive(
    code: &CompoundCode,
    s: &BitVector,
    constraint: &Constraint,
) -> Result<SourceEncodeResult> {
    nearest_codeword(&Codebook::new(code, constraint)?, s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Decoded,
    Erasure,
    Error,
}

/// Which rule produced a decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeRule {
    MaximumLikelihood,
    Threshold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    pub x_hat: Option<BitVector>,
    pub y_hat: Option<BitVector>,
    pub rule: DecodeRule,
    /// Threshold rule only: distinct codewords found within the radius
    /// (the scan stops at 2).
    pub within_radius: Option<usize>,
}

impl DecodeResult {
    /// Turns a decoded result into an error when it disagrees with `truth`.
    pub fn judge(mut self, truth: &BitVector) -> Self {
        if self.status == DecodeStatus::Decoded && self.x_hat.as_ref() != Some(truth) {
            self.status = DecodeStatus::Error;
        }
        self
    }
}

/// Maximum-likelihood decoding over a BSC, i.e. the nearest codeword.
pub fn channel_decode_ml(code: &CompoundCode, v: &BitVector, constraint: &Constraint) -> Result<DecodeResult> {
    decode_ml_in(&Codebook::new(code, constraint)?, v)
}

pub fn decode_ml_in(book: &Codebook, v: &BitVector) -> Result<DecodeResult> {
    let best = nearest_codeword(book, v)?;
    Ok(DecodeResult {
        status: DecodeStatus::Decoded,
        x_hat: Some(best.x_hat),
        y_hat: Some(best.y_hat),
        rule: DecodeRule::MaximumLikelihood,
        within_radius: None,
    })
}

/// Decoding radius `p·n + ε_n`, with `ε_n = n^{2/3}` by default.
pub fn threshold_radius(n: usize, p: f64, epsilon_n: Option<f64>) -> f64 {
    p * n as f64 + epsilon_n.unwrap_or_else(|| (n as f64).powf(2.0 / 3.0))
}

/// Threshold decoding: succeed iff exactly one codeword lies within
/// `p·n + ε_n` of `v`, otherwise declare an erasure.
pub fn channel_decode_threshold(
    code: &CompoundCode,
    v: &BitVector,
    p: f64,
    epsilon_n: Option<f64>,
    constraint: &Constraint,
) -> Result<DecodeResult> {
    decode_threshold_in(&Codebook::new(code, constraint)?, v, p, epsilon_n)
}

pub fn decode_threshold_in(book: &Codebook, v: &BitVector, p: f64, epsilon_n: Option<f64>) -> Result<DecodeResult> {
    check_len("received word", v, book.blocklength())?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("p", p, "[0, 1]"));
    }
    let radius = threshold_radius(v.len(), p, epsilon_n);
    let mut found: Option<(BitVector, BitVector)> = None;
    let mut count = 0usize;
    book.for_each(|y, x| {
        if x.distance(v) as f64 <= radius {
            match &found {
                Some((_, fx)) if fx == x => {}
                Some(_) => {
                    count = 2;
                    return ControlFlow::Break(());
                }
                None => {
                    found = Some((y.clone(), x.clone()));
                    count = 1;
                }
            }
        }
        ControlFlow::Continue(())
    });
    let (status, y_hat, x_hat) = match (count, found) {
        (1, Some((y, x))) => (DecodeStatus::Decoded, Some(y), Some(x)),
        _ => (DecodeStatus::Erasure, None, None),
    };
    Ok(DecodeResult {
        status,
        x_hat,
        y_hat,
        rule: DecodeRule::Threshold,
        within_radius: Some(count),
    })
}

/// Decoding strategy used by the pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Decoder {
    MaximumLikelihood,
    Threshold {
        epsilon_n: Option<f64>,
    },
    /// Threshold rule, falling back to maximum likelihood on erasure.
    ThresholdThenMl {
        epsilon_n: Option<f64>,
    },
}

impl Default for Decoder {
    fn default() -> Self {
        Decoder::ThresholdThenMl { epsilon_n: None }
    }
}

impl Decoder {
    pub fn decode(&self, book: &Codebook, v: &BitVector, p: f64) -> Result<DecodeResult> {
        match *self {
            Decoder::MaximumLikelihood => decode_ml_in(book, v),
            Decoder::Threshold { epsilon_n } => decode_threshold_in(book, v, p, epsilon_n),
            Decoder::ThresholdThenMl { epsilon_n } => {
                let t = decode_threshold_in(book, v, p, epsilon_n)?;
                if t.status == DecodeStatus::Decoded {
                    Ok(t)
                } else {
                    decode_ml_in(book, v)
                }
            }
        }
    }
}

/// `⌊D n⌋`, guarded against `D n` landing a hair below an integer.
pub fn distortion_radius(n: usize, d: f64) -> usize {
    ((d * n as f64) + 1e-9).floor().min(n as f64) as usize
}

/// Number of distinct admissible codewords within distance `⌊D n⌋` of `s`.
pub fn count_good_codewords(code: &CompoundCode, s: &BitVector, d: f64, constraint: &Constraint) -> Result<u64> {
    let book = Codebook::new(code, constraint)?;
    check_len("source word", s, book.blocklength())?;
    let r = distortion_radius(s.len(), d);
    let mut count = 0u64;
    book.for_each_distinct::<()>(|_, x| {
        if x.distance(s) <= r {
            count += 1;
        }
        ControlFlow::Continue(())
    });
    Ok(count)
}
