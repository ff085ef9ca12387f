use rand::Rng;
use serde::{Deserialize, Serialize};

use super::plan::{RatePlan, SideInfoMode};
use crate::analysis::bernoulli_convolve;
use crate::codec::{nearest_codeword, Codebook, Constraint, DecodeRule, DecodeStatus, Decoder};
use crate::ensembles::CompoundCode;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::rng::trial_rng;
use crate::stats::{try_run_trials, MeanEstimate};

/// Every intermediate signal of one pipeline run.
///
/// SCSI: `source` is quantized to `quantized = G info_word` with
/// `H1 info_word = 0`; `syndrome = H2 info_word` is sent; the decoder sees
/// `received = source ⊕ noise` and searches the coset labelled by the
/// syndrome.
///
/// CCSI: `syndrome` is the message; `source` (the host) is quantized within
/// the coset of the message; the channel input is
/// `quantization_error = source ⊕ quantized` and the receiver sees
/// `received = quantization_error ⊕ source ⊕ noise = quantized ⊕ noise`,
/// which it decodes over `{H1 y = 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub mode: SideInfoMode,
    /// False when the message's coset is empty (CCSI only).
    pub feasible: bool,
    pub source: BitVector,
    pub quantized: BitVector,
    pub info_word: BitVector,
    pub syndrome: BitVector,
    pub quantization_error: BitVector,
    pub noise: BitVector,
    pub received: BitVector,
    pub decoded_x: Option<BitVector>,
    pub decoded_y: Option<BitVector>,
    pub decoded_message: Option<BitVector>,
    pub decode_status: DecodeStatus,
    pub decode_rule: DecodeRule,
    /// SCSI: the decoder output equals the quantized word. CCSI: the
    /// recovered message equals the sent one.
    pub recovered: bool,
    /// `‖source ⊕ quantized‖ / n`.
    pub quantization_distortion: f64,
    /// SCSI: `‖reconstruction ⊕ source‖ / n`, where the reconstruction is
    /// the decoder output, or the side information itself on erasure.
    /// CCSI: `‖quantization_error‖ / n`, the channel-input weight.
    pub distortion: f64,
    /// `‖noise‖ / n`.
    pub channel_weight: f64,
}

impl PipelineTrace {
    /// Algebraic identities that must hold in every trace; returns the
    /// broken ones.
    pub fn invariant_violations(&self, code: &CompoundCode) -> Vec<&'static str> {
        let mut bad = Vec::new();
        if !self.feasible {
            return bad;
        }
        let n = code.n() as f64;
        let h1 = code.h1();
        let h2 = code.h2();
        if code.encode(&self.info_word).ok().as_ref() != Some(&self.quantized) {
            bad.push("quantized word is not G times the information word");
        }
        if !h1.matvec(&self.info_word).map(|v| v.is_zero()).unwrap_or(false) {
            bad.push("information word violates H1");
        }
        if h2.matvec(&self.info_word).ok().as_ref() != Some(&self.syndrome) {
            bad.push("H2 times the information word differs from the syndrome");
        }
        if &self.source ^ &self.quantized != self.quantization_error {
            bad.push("quantization error is not source xor quantized");
        }
        if (self.quantization_error.weight() as f64 / n - self.quantization_distortion).abs() > 1e-15 {
            bad.push("quantization distortion differs from the error weight");
        }
        if let Some(y) = &self.decoded_y {
            if code.encode(y).ok().as_ref() != self.decoded_x.as_ref() {
                bad.push("decoded codeword is not G times the decoded information word");
            }
            if !h1.matvec(y).map(|v| v.is_zero()).unwrap_or(false) {
                bad.push("decoded information word violates H1");
            }
        }
        match self.mode {
            SideInfoMode::Scsi => {
                if &self.received ^ &self.quantized != &self.quantization_error ^ &self.noise {
                    bad.push("received xor quantized differs from error xor noise");
                }
                if let Some(y) = &self.decoded_y {
                    if h2.matvec(y).ok().as_ref() != Some(&self.syndrome) {
                        bad.push("decoded word left the syndrome's coset");
                    }
                }
                if self.recovered != (self.decoded_x.as_ref() == Some(&self.quantized)) {
                    bad.push("recovery flag disagrees with the decoder output");
                }
            }
            SideInfoMode::Ccsi => {
                if self.received != &self.quantized ^ &self.noise {
                    bad.push("received word differs from quantized xor noise");
                }
                if (self.distortion - self.quantization_distortion).abs() > 1e-15 {
                    bad.push("channel-input weight differs from the quantizer distortion");
                }
                if let (Some(y), Some(m)) = (&self.decoded_y, &self.decoded_message) {
                    if h2.matvec(y).ok().as_ref() != Some(m) {
                        bad.push("recovered message is not H2 times the decoded word");
                    }
                }
                if self.recovered != (self.decoded_message.as_ref() == Some(&self.syndrome)) {
                    bad.push("recovery flag disagrees with the recovered message");
                }
            }
        }
        bad
    }
}

/// Wyner-Ziv run: quantize `s` with `{H1 y = 0}`, send `H2 ŷ`, and decode the
/// quantized word from `s ⊕ noise`, noise i.i.d. Bernoulli(`plan.p`).
///
/// The threshold radius assumes the decoder's effective noise is
/// Bernoulli(`D ∗ p`) with `D = plan.target`.
pub fn run_scsi<R: Rng + ?Sized>(
    code: &CompoundCode,
    plan: &RatePlan,
    s: &BitVector,
    decoder: &Decoder,
    rng: &mut R,
) -> Result<PipelineTrace> {
    check_mode(plan, SideInfoMode::Scsi)?;
    plan.check_code(code)?;
    let base = Codebook::new(code, &Constraint::Base)?;
    let q = nearest_codeword(&base, s)?;
    let syndrome = code.syndrome(&q.y_hat)?;
    let noise = BitVector::random(code.n(), plan.p, rng);
    let received = s ^ &noise;
    let coset = Codebook::new(code, &Constraint::Coset(syndrome.clone()))?;
    let p_eff = bernoulli_convolve(plan.target, plan.p)?;
    let decision = decoder.decode(&coset, &received, p_eff)?;
    let reconstruction = decision.x_hat.clone().unwrap_or_else(|| received.clone());
    let recovered = decision.x_hat.as_ref() == Some(&q.x_hat);
    let n = code.n() as f64;
    Ok(PipelineTrace {
        mode: SideInfoMode::Scsi,
        feasible: true,
        quantization_error: s ^ &q.x_hat,
        distortion: reconstruction.distance(s) as f64 / n,
        channel_weight: noise.weight() as f64 / n,
        quantization_distortion: q.distortion,
        source: s.clone(),
        decode_status: if decision.x_hat.is_some() && !recovered {
            DecodeStatus::Error
        } else {
            decision.status
        },
        decode_rule: decision.rule,
        decoded_x: decision.x_hat,
        decoded_y: decision.y_hat,
        decoded_message: None,
        quantized: q.x_hat,
        info_word: q.y_hat,
        syndrome,
        noise,
        received,
        recovered,
    })
}

/// Gelfand-Pinsker run: quantize the host within the coset of `message`,
/// send the quantization error, and recover the message as `H2 ŷ` from the
/// decoded word of `{H1 y = 0}`.
pub fn run_ccsi<R: Rng + ?Sized>(
    code: &CompoundCode,
    plan: &RatePlan,
    message: &BitVector,
    host: &BitVector,
    decoder: &Decoder,
    rng: &mut R,
) -> Result<PipelineTrace> {
    check_mode(plan, SideInfoMode::Ccsi)?;
    plan.check_code(code)?;
    let n = code.n();
    let coset = Codebook::new(code, &Constraint::Coset(message.clone()))?;
    let noise = BitVector::random(n, plan.p, rng);
    if coset.is_empty() {
        return Ok(PipelineTrace {
            mode: SideInfoMode::Ccsi,
            feasible: false,
            source: host.clone(),
            quantized: BitVector::zeros(n),
            info_word: BitVector::zeros(code.m()),
            syndrome: message.clone(),
            quantization_error: BitVector::zeros(n),
            noise: noise.clone(),
            received: noise,
            decoded_x: None,
            decoded_y: None,
            decoded_message: None,
            decode_status: DecodeStatus::Erasure,
            decode_rule: DecodeRule::Threshold,
            recovered: false,
            quantization_distortion: 0.0,
            distortion: 0.0,
            channel_weight: 0.0,
        });
    }
    let q = nearest_codeword(&coset, host)?;
    let channel_input = host ^ &q.x_hat;
    let received = &(&channel_input ^ host) ^ &noise;
    let base = Codebook::new(code, &Constraint::Base)?;
    let decision = decoder.decode(&base, &received, plan.p)?;
    let decoded_message = decision.y_hat.as_ref().map(|y| code.syndrome(y)).transpose()?;
    let recovered = decoded_message.as_ref() == Some(message);
    let nf = n as f64;
    Ok(PipelineTrace {
        mode: SideInfoMode::Ccsi,
        feasible: true,
        distortion: channel_input.weight() as f64 / nf,
        channel_weight: noise.weight() as f64 / nf,
        quantization_distortion: q.distortion,
        quantization_error: channel_input,
        source: host.clone(),
        decode_status: if decoded_message.is_some() && !recovered {
            DecodeStatus::Error
        } else {
            decision.status
        },
        decode_rule: decision.rule,
        decoded_x: decision.x_hat,
        decoded_y: decision.y_hat,
        decoded_message,
        quantized: q.x_hat,
        info_word: q.y_hat,
        syndrome: message.clone(),
        noise,
        received,
        recovered,
    })
}

fn check_mode(plan: &RatePlan, mode: SideInfoMode) -> Result<()> {
    if plan.mode == mode {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "plan is for {:?}, pipeline is {mode:?}",
            plan.mode
        )))
    }
}

/// One CSV row of a batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub trial: u64,
    pub feasible: bool,
    pub recovered: bool,
    pub distortion: f64,
    pub channel_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub mode: SideInfoMode,
    pub trials: usize,
    /// Trials whose coset existed (always all of them for SCSI).
    pub feasible: usize,
    /// Recovery rate over feasible trials.
    pub recovery: MeanEstimate,
    /// SCSI end distortion or CCSI channel-input weight, feasible trials.
    pub distortion: MeanEstimate,
    pub quantization_distortion: MeanEstimate,
    pub channel_weight: MeanEstimate,
    pub invariant_violations: usize,
    /// Decisions that came from the ML fallback.
    pub ml_fallbacks: usize,
    pub rows: Vec<BatchRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<PipelineTrace>>,
}

impl BatchSummary {
    /// CSV `trial,recovered,distortion,channel_weight`; infeasible CCSI
    /// trials are left out.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,recovered,distortion,channel_weight\n");
        for r in self.rows.iter().filter(|r| r.feasible) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.trial,
                r.recovered as u8,
                crate::analysis::format_sig(r.distortion),
                crate::analysis::format_sig(r.channel_weight)
            ));
        }
        out
    }
}

fn summarize(mode: SideInfoMode, code: &CompoundCode, traces: Vec<PipelineTrace>, keep: bool) -> BatchSummary {
    let feasible: Vec<&PipelineTrace> = traces.iter().filter(|t| t.feasible).collect();
    let collect =
        |f: fn(&PipelineTrace) -> f64| MeanEstimate::from_samples(&feasible.iter().map(|t| f(t)).collect::<Vec<_>>());
    let rows = traces
        .iter()
        .enumerate()
        .map(|(i, t)| BatchRow {
            trial: i as u64,
            feasible: t.feasible,
            recovered: t.recovered,
            distortion: t.distortion,
            channel_weight: t.channel_weight,
        })
        .collect();
    BatchSummary {
        mode,
        trials: traces.len(),
        feasible: feasible.len(),
        recovery: MeanEstimate::from_flags(feasible.iter().map(|t| t.recovered)),
        distortion: collect(|t| t.distortion),
        quantization_distortion: collect(|t| t.quantization_distortion),
        channel_weight: collect(|t| t.channel_weight),
        invariant_violations: traces.iter().map(|t| t.invariant_violations(code).len()).sum(),
        ml_fallbacks: feasible
            .iter()
            .filter(|t| t.decode_rule == DecodeRule::MaximumLikelihood)
            .count(),
        rows,
        traces: keep.then_some(traces),
    }
}

/// `trials` SCSI runs on uniform sources; trial `i` draws from stream
/// `(seed, i)`.
pub fn run_scsi_batch(
    code: &CompoundCode,
    plan: &RatePlan,
    decoder: &Decoder,
    trials: usize,
    seed: u64,
    keep_traces: bool,
) -> Result<BatchSummary> {
    let traces = try_run_trials(trials, |i| {
        let mut rng = trial_rng(seed, i);
        let s = BitVector::random_uniform(code.n(), &mut rng);
        run_scsi(code, plan, &s, decoder, &mut rng)
    })?;
    Ok(summarize(SideInfoMode::Scsi, code, traces, keep_traces))
}

/// `trials` CCSI runs with uniform messages and hosts.
pub fn run_ccsi_batch(
    code: &CompoundCode,
    plan: &RatePlan,
    decoder: &Decoder,
    trials: usize,
    seed: u64,
    keep_traces: bool,
) -> Result<BatchSummary> {
    let traces = try_run_trials(trials, |i| {
        let mut rng = trial_rng(seed, i);
        let message = BitVector::random_uniform(code.k2(), &mut rng);
        let host = BitVector::random_uniform(code.n(), &mut rng);
        run_ccsi(code, plan, &message, &host, decoder, &mut rng)
    })?;
    Ok(summarize(SideInfoMode::Ccsi, code, traces, keep_traces))
}
