//! Exponential growth rate of the average weight enumerator of a regular
//! LDPC ensemble.

use std::f64::consts::LN_2;

use super::entropy::h_nats;
use super::optimize::bisect_increasing;
use super::overlap::SaddleSolution;
use crate::error::{Error, Result};

const LAMBDA_FLOOR: f64 = -60.0;
const LAMBDA_TOL: f64 = 1e-12;

fn check_degrees(dv: usize, dc_prime: usize) -> Result<()> {
    if dc_prime % 2 == 1 {
        return Err(Error::Unsupported(format!(
            "odd check degree dc′ = {dc_prime}; the bound is only symmetric for even degrees"
        )));
    }
    if dv == 0 || dc_prime == 0 || dv >= dc_prime {
        return Err(Error::InvalidParams(format!(
            "need 1 ≤ dv < dc′ (got dv = {dv}, dc′ = {dc_prime})"
        )));
    }
    Ok(())
}

/// `ln((1+x)^c + (1−x)^c)` for `x ∈ [0, 1]`.
fn ln_check_mgf(x: f64, c: usize) -> f64 {
    let ratio = (1.0 - x) / (1.0 + x);
    c as f64 * x.ln_1p() + ratio.powi(c as i32).ln_1p()
}

/// Left side of the stationarity equation; increasing in `λ`, equal to ½ at 0.
fn check_mean(lambda: f64, c: usize) -> f64 {
    let x = lambda.exp();
    let ratio = (1.0 - x) / (1.0 + x);
    let rc1 = ratio.powi(c as i32 - 1);
    // e^λ[(1+x)^{c−1} − (1−x)^{c−1}] / [(1+x)^c + (1−x)^c], divided through by (1+x)^c
    x * (1.0 - rc1) / ((1.0 + x) * (1.0 + rc1 * ratio))
}

/// Inner infimum `inf_{λ≤0} (1/c) ln((1+e^λ)^c + (1−e^λ)^c) − wλ` for
/// `w ∈ (0, 1/2]`, in nats.
pub fn enum_inner_saddle(w: f64, dc_prime: usize) -> Result<SaddleSolution> {
    if !(w > 0.0 && w <= 0.5) {
        return Err(Error::domain("w", w, "(0, 1/2]"));
    }
    if dc_prime < 2 {
        return Err(Error::InvalidParams("dc′ must be at least 2".into()));
    }
    let c = dc_prime;
    let lambda = if w == 0.5 {
        0.0
    } else {
        bisect_increasing(|l| check_mean(l, c) - w, LAMBDA_FLOOR, 0.0, LAMBDA_TOL)
    };
    Ok(SaddleSolution {
        lambda_star: lambda,
        value: ln_check_mgf(lambda.exp(), c) / c as f64 - w * lambda,
        residual: (check_mean(lambda, c) - w).abs(),
    })
}

pub(crate) fn enum_bound_nats(w: f64, dv: usize, dc_prime: usize) -> f64 {
    let w = if w > 0.5 { 1.0 - w } else { w };
    let r_h = 1.0 - dv as f64 / dc_prime as f64;
    if w == 0.0 {
        return 0.0;
    }
    if w == 0.5 {
        return r_h * LN_2;
    }
    let inner = enum_inner_saddle(w, dc_prime).expect("w checked above").value;
    (1.0 - dv as f64) * h_nats(w) - (1.0 - r_h) * LN_2 + dv as f64 * inner
}

/// Growth rate `B(w; dv, dc′)` of the average weight enumerator, in bits:
/// the ensemble has about `2^{m B(w)}` codewords of relative weight `w`.
///
/// `B(0) = 0` (the zero word), `B(1/2) = 1 − dv/dc′`, and `B(w) = B(1 − w)`.
/// Only even `dc′` is supported.
pub fn ldpc_enum_bound_b(w: f64, dv: usize, dc_prime: usize) -> Result<f64> {
    check_degrees(dv, dc_prime)?;
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::domain("w", w, "[0, 1]"));
    }
    Ok(enum_bound_nats(w, dv, dc_prime) / LN_2)
}
