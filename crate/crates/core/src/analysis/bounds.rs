//! Achievability conditions for lossy source coding and channel coding with
//! compound codes.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::entropy::{conv, delta, h_nats, kl_nats};
use super::enumerator::enum_bound_nats;
use super::optimize::{grid_max, Extremum};
use super::overlap::overlap_f_nats;
use crate::error::{Error, Result};

/// Code that constrains the information word of the LDGM top code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LowerCode {
    /// No constraint: a plain LDGM code with `R_H = 1`.
    Uncoded,
    /// Regular LDPC with column degree `dv` and row degree `dc_prime`.
    Ldpc { dv: usize, dc_prime: usize },
}

impl LowerCode {
    pub fn ldpc(dv: usize, dc_prime: usize) -> Result<Self> {
        let code = LowerCode::Ldpc { dv, dc_prime };
        code.validate()?;
        Ok(code)
    }

    pub fn validate(&self) -> Result<()> {
        if let LowerCode::Ldpc { dv, dc_prime } = *self {
            super::enumerator::ldpc_enum_bound_b(0.25, dv, dc_prime)?;
        }
        Ok(())
    }

    /// `1 − dv/dc′`, or 1 when uncoded.
    pub fn r_h(&self) -> f64 {
        match *self {
            LowerCode::Uncoded => 1.0,
            LowerCode::Ldpc { dv, dc_prime } => 1.0 - dv as f64 / dc_prime as f64,
        }
    }

    /// Enumerator growth rate in nats: `B(w)`, or `h(w)` when uncoded.
    pub(crate) fn growth_nats(&self, w: f64) -> f64 {
        match *self {
            LowerCode::Uncoded => h_nats(w),
            LowerCode::Ldpc { dv, dc_prime } => enum_bound_nats(w, dv, dc_prime),
        }
    }
}

/// Default width of the excluded band below `w = 1/2`, where the rate ratio
/// is `0/0`.
pub const DEFAULT_ENDPOINT_BAND: f64 = 1e-4;
/// Default grid size for outer maximizations over `w`.
pub const DEFAULT_GRID: usize = 2000;
/// Golden-section tolerance on `w`.
pub const REFINE_TOL: f64 = 1e-9;

fn check_open_half(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 0.5 {
        Ok(())
    } else {
        Err(Error::domain(name, x, "(0, 1/2)"))
    }
}

fn check_w(w: f64) -> Result<()> {
    if (0.0..=0.5).contains(&w) {
        Ok(())
    } else {
        Err(Error::domain("w", w, "[0, 1/2]"))
    }
}

/// Both forms of the lossy source coding condition at one weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdObjective {
    /// `R·B(w)/R_H + F(δ(w), D)`, bits.
    pub k: f64,
    /// `(1 − h(D) + F(δ(w), D)) / (1 − B(w)/R_H)`, bits; `None` at `w = 1/2`
    /// where it is `0/0`.
    pub ratio: Option<f64>,
}

pub(crate) fn rd_ratio_nats(w: f64, d: f64, d_top: usize, lower: LowerCode) -> f64 {
    let num = LN_2 - h_nats(d) + overlap_f_nats(delta(w, d_top), d);
    let den = 1.0 - lower.growth_nats(w) / (LN_2 * lower.r_h());
    num / den
}

/// Evaluates the sufficiency function `K(w)` at rate `rate` and the rate
/// ratio whose maximum over `w` is the smallest rate the ensemble achieves
/// at distortion `d`.
pub fn rd_objective_k(w: f64, d: f64, rate: f64, d_top: usize, lower: LowerCode) -> Result<RdObjective> {
    check_w(w)?;
    check_open_half("D", d)?;
    lower.validate()?;
    let k = rate * lower.growth_nats(w) / lower.r_h() + overlap_f_nats(delta(w, d_top), d);
    let ratio = (w < 0.5).then(|| rd_ratio_nats(w, d, d_top, lower) / LN_2);
    Ok(RdObjective { k: k / LN_2, ratio })
}

/// Maximum of the rate ratio over `w ∈ [0, 1/2 − band]`: the rate the
/// ensemble provably achieves at distortion `d`, in bits.
pub fn rd_min_rate(d: f64, d_top: usize, lower: LowerCode, grid: usize, band: f64) -> Result<Extremum> {
    check_open_half("D", d)?;
    lower.validate()?;
    if grid < 2 {
        return Err(Error::InvalidParams(format!(
            "grid must have at least 2 points, got {grid}"
        )));
    }
    if !(band > 0.0 && band < 0.5) {
        return Err(Error::domain("band", band, "(0, 1/2)"));
    }
    let best = grid_max(|w| rd_ratio_nats(w, d, d_top, lower), 0.0, 0.5 - band, grid, REFINE_TOL);
    Ok(Extremum {
        w: best.w,
        value: best.value / LN_2,
    })
}

/// `R − (1 − h(D))`: growth rate of the expected number of `D`-good codewords.
pub fn first_moment_exponent(rate: f64, d: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::domain("D", d, "[0, 1]"));
    }
    Ok(rate - (1.0 - h_nats(d) / LN_2))
}

pub(crate) fn channel_l_nats(w: f64, p: f64, d_top: usize, lower: LowerCode, r_g: f64) -> f64 {
    r_g * lower.growth_nats(w) - kl_nats(p, conv(delta(w, d_top), p))
}

pub(crate) fn channel_l_tilde_nats(w: f64, p: f64, d_top: usize, rate: f64) -> f64 {
    rate * h_nats(w) - kl_nats(p, conv(delta(w, d_top), p))
}

/// The exponents are defined for every weight in `(0, 1)`; the channel
/// condition only looks at `(0, 1/2]`.
fn check_channel(w: f64, p: f64) -> Result<()> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::domain("w", w, "(0, 1)"));
    }
    check_open_half("p", p)
}

/// `L(w) = R_G B(w) − D(p ‖ δ(w) ∗ p)` in bits: growth rate of the expected
/// number of weight-`w` codewords that look at least as likely as the sent
/// one over a BSC(`p`).
pub fn channel_exponent_l(w: f64, p: f64, d_top: usize, lower: LowerCode, r_g: f64) -> Result<f64> {
    check_channel(w, p)?;
    lower.validate()?;
    Ok(channel_l_nats(w, p, d_top, lower, r_g) / LN_2)
}

/// `L̃(w) = R h(w) − D(p ‖ δ(w) ∗ p)` in bits, an upper bound on `L` when
/// `R = R_G R_H`.
pub fn channel_exponent_l_tilde(w: f64, p: f64, d_top: usize, rate: f64) -> Result<f64> {
    check_channel(w, p)?;
    Ok(channel_l_tilde_nats(w, p, d_top, rate) / LN_2)
}

/// Outcome of the channel coding condition check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelCondition {
    /// `L(w) < 0` at every evaluated `w`.
    pub holds: bool,
    /// Weight where `L` is largest.
    pub worst_w: f64,
    /// `L(worst_w)`, bits.
    pub worst_value: f64,
}

/// Checks `L(w) < 0` for `w ∈ (0, 1/2]` on a `grid`-point mesh starting at
/// `1/(2·grid)`, refined by golden section around the worst node.
///
/// For `dv ≥ 3`, `L(w)` tends to zero from below as `w → 0`, so the supremum
/// over the open interval is 0 even when the condition holds; the check is
/// therefore pointwise.
pub fn channel_condition_holds(
    p: f64,
    d_top: usize,
    lower: LowerCode,
    r_g: f64,
    grid: usize,
) -> Result<ChannelCondition> {
    check_open_half("p", p)?;
    lower.validate()?;
    if grid < 2 {
        return Err(Error::InvalidParams(format!(
            "grid must have at least 2 points, got {grid}"
        )));
    }
    let lo = 0.5 / grid as f64;
    let worst = grid_max(|w| channel_l_nats(w, p, d_top, lower, r_g), lo, 0.5, grid, REFINE_TOL);
    Ok(ChannelCondition {
        holds: worst.value < 0.0,
        worst_w: worst.w,
        worst_value: worst.value / LN_2,
    })
}

/// Smallest `d_top` in `candidates` for which the channel condition holds.
pub fn smallest_passing_degree(
    p: f64,
    lower: LowerCode,
    r_g: f64,
    candidates: impl IntoIterator<Item = usize>,
    grid: usize,
) -> Result<Option<(usize, ChannelCondition)>> {
    for d in candidates {
        let c = channel_condition_holds(p, d, lower, r_g, grid)?;
        if c.holds {
            return Ok(Some((d, c)));
        }
    }
    Ok(None)
}
