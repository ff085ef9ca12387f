//! Binary entropy, Bernoulli convolution, KL divergence and the LDGM bit bias.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// `x ln y` with `0 ln 0 = 0`.
#[inline]
pub(crate) fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Binary entropy in nats; no domain check.
#[inline]
pub(crate) fn h_nats(w: f64) -> f64 {
    -xlny(w, w) - xlny(1.0 - w, 1.0 - w)
}

fn unit_interval(name: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(name, x, "[0, 1]"))
    }
}

/// `h(w) = −w log2 w − (1−w) log2 (1−w)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(w: f64) -> Result<f64> {
    unit_interval("w", w)?;
    Ok(h_nats(w) / LN_2)
}

/// `a ∗ b = a(1−b) + (1−a)b`, the flip probability of two independent flips.
pub fn bernoulli_convolve(a: f64, b: f64) -> Result<f64> {
    unit_interval("a", a)?;
    unit_interval("b", b)?;
    Ok(conv(a, b))
}

#[inline]
pub(crate) fn conv(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + (1.0 - a) * b
}

/// Divergence between Bernoulli(p) and Bernoulli(q) in nats; no domain check.
#[inline]
pub(crate) fn kl_nats(p: f64, q: f64) -> f64 {
    xlny(p, p / q) + xlny(1.0 - p, (1.0 - p) / (1.0 - q))
}

/// `D(p ‖ q)` between Bernoulli laws, in bits.
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("p", p, "(0, 1)"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain("q", q, "(0, 1)"));
    }
    Ok(kl_nats(p, q) / LN_2)
}

/// `δ(w; d) = ½[1 − (1−2w)^d]`: probability that an LDGM bit whose row has
/// degree `d` is one when the information word has relative weight `w`.
pub fn delta_fun(w: f64, d_top: usize) -> Result<f64> {
    unit_interval("w", w)?;
    if d_top == 0 {
        return Err(Error::InvalidParams("d_top must be at least 1".into()));
    }
    Ok(delta(w, d_top))
}

#[inline]
pub(crate) fn delta(w: f64, d_top: usize) -> f64 {
    0.5 * (1.0 - (1.0 - 2.0 * w).powi(d_top as i32))
}
