//! Overlap probability: the chance that a codeword at a given relative
//! weight is also within distortion `D` of a source word that the zero
//! codeword already covers.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::entropy::{delta, xlny};
use crate::error::{Error, Result};

/// Minimizer of a one-dimensional Chernoff problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaddleSolution {
    pub lambda_star: f64,
    /// Optimal value, nats.
    pub value: f64,
    /// Magnitude of the stationarity condition at `lambda_star`.
    pub residual: f64,
}

fn check_distortion(d: f64) -> Result<()> {
    if d > 0.0 && d < 0.5 {
        Ok(())
    } else {
        Err(Error::domain("D", d, "(0, 1/2)"))
    }
}

/// Chernoff objective `D ln[(1−t)e^λ + t] + (1−D) ln[(1−t) + t e^λ] − λD`.
pub(crate) fn chernoff_objective(t: f64, d: f64, lambda: f64) -> f64 {
    let e = lambda.exp();
    d * ((1.0 - t) * e + t).ln() + (1.0 - d) * ((1.0 - t) + t * e).ln() - lambda * d
}

/// Derivative of [`chernoff_objective`] in `λ`.
pub(crate) fn chernoff_slope(t: f64, d: f64, lambda: f64) -> f64 {
    let e = lambda.exp();
    d * (1.0 - t) * e / ((1.0 - t) * e + t) + (1.0 - d) * t * e / ((1.0 - t) + t * e) - d
}

/// Closed-form saddle point of the overlap exponent.
///
/// Stationarity reduces to `a ρ² + b ρ + c = 0` in `ρ = e^λ` with
/// `a = t(1−t)(1−D)`, `b = (1−2D)t²`, `c = −t(1−t)D`; the positive root is
/// taken in the cancellation-free form `ρ = −2c / (b + √(b² − 4ac))`.
pub fn overlap_lambda_star(t: f64, d: f64) -> Result<SaddleSolution> {
    check_distortion(d)?;
    if t == 0.0 {
        return Err(Error::Domain {
            name: "t",
            value: t,
            domain: "(0, 1/2]; λ* diverges to −∞ at t = 0",
        });
    }
    if !(t > 0.0 && t <= 0.5) {
        return Err(Error::domain("t", t, "(0, 1/2]"));
    }
    let rho = overlap_root(t, d);
    let lambda = rho.ln();
    Ok(SaddleSolution {
        lambda_star: lambda,
        value: chernoff_objective(t, d, lambda),
        residual: chernoff_slope(t, d, lambda).abs(),
    })
}

pub(crate) fn overlap_coefficients(t: f64, d: f64) -> (f64, f64, f64) {
    (t * (1.0 - t) * (1.0 - d), (1.0 - 2.0 * d) * t * t, -t * (1.0 - t) * d)
}

fn overlap_root(t: f64, d: f64) -> f64 {
    let (a, b, c) = overlap_coefficients(t, d);
    -2.0 * c / (b + (b * b - 4.0 * a * c).sqrt())
}

/// Overlap exponent `F(t; D)` in nats, `F(0; D) = 0`.
pub(crate) fn overlap_f_nats(t: f64, d: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    chernoff_objective(t, d, overlap_root(t, d).ln())
}

/// Overlap exponent `F(t; D)` in bits, for `t ∈ [0, 1/2]`.
///
/// Ranges from `0` at `t = 0` down to `−(1 − h(D))` at `t = 1/2`.
pub fn overlap_exponent_f(t: f64, d: f64) -> Result<f64> {
    check_distortion(d)?;
    if !(0.0..=0.5).contains(&t) {
        return Err(Error::domain("t", t, "[0, 1/2]"));
    }
    Ok(overlap_f_nats(t, d) / LN_2)
}

/// Largest blocklength accepted by [`exact_overlap_log_prob`].
pub const EXACT_OVERLAP_MAX_N: usize = 2000;

/// `ln C(n, k)` for all `k ≤ n`, from a log-factorial table.
struct LogBinomials {
    ln_fact: Vec<f64>,
}

impl LogBinomials {
    fn new(n: usize) -> Self {
        let mut ln_fact = vec![0.0; n + 1];
        for i in 1..=n {
            ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
        }
        LogBinomials { ln_fact }
    }

    fn ln_choose(&self, n: usize, k: usize) -> f64 {
        self.ln_fact[n] - self.ln_fact[k] - self.ln_fact[n - k]
    }

    /// `ln P[Bin(trials, q) = j]` for `j = 0..=min(trials, cut)`.
    fn ln_pmf(&self, trials: usize, q: f64, cut: usize) -> Vec<f64> {
        (0..=trials.min(cut))
            .map(|j| {
                let (s, f) = (j as f64, (trials - j) as f64);
                let log_q = if q == 0.0 {
                    if j == 0 {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    xlny(s, q)
                };
                let log_p = if q == 1.0 {
                    if j == trials {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    xlny(f, 1.0 - q)
                };
                self.ln_choose(trials, j) + log_q + log_p
            })
            .collect()
    }
}

fn logsumexp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Exact `(1/n) ln Q` in nats for the finite-`n` overlap model.
///
/// With `r = ⌊D n⌋`, the source weight `T` takes values `0..=r` with weights
/// proportional to `C(n, t)`; given `T = t`, the number of disagreements
/// with a weight-`w` codeword is `Bin(t, 1−δ) + Bin(n−t, δ)` where
/// `δ = δ(w; d_top)`, and `Q` is the probability that it is at most `r`.
pub fn exact_overlap_log_prob(n: usize, w: f64, d: f64, d_top: usize) -> Result<f64> {
    if n == 0 || n > EXACT_OVERLAP_MAX_N {
        return Err(Error::InvalidParams(format!(
            "blocklength {n} outside 1..={EXACT_OVERLAP_MAX_N}"
        )));
    }
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::domain("w", w, "[0, 1]"));
    }
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::domain("D", d, "[0, 1]"));
    }
    if d_top == 0 {
        return Err(Error::InvalidParams("d_top must be at least 1".into()));
    }
    let r = ((d * n as f64) + 1e-9).floor() as usize;
    let r = r.min(n);
    let q = delta(w, d_top);
    let tables = LogBinomials::new(n);
    let ln_norm = logsumexp((0..=r).map(|t| tables.ln_choose(n, t)));
    let terms = (0..=r).map(|t| {
        let kept = tables.ln_pmf(t, 1.0 - q, r);
        let flipped = tables.ln_pmf(n - t, q, r);
        // P[A + B ≤ r] = Σ_i P[A = i] P[B ≤ r − i]
        let mut cdf = Vec::with_capacity(flipped.len());
        let mut acc = f64::NEG_INFINITY;
        for &x in &flipped {
            acc = logsumexp([acc, x]);
            cdf.push(acc);
        }
        let ln_success = logsumexp(kept.iter().enumerate().map(|(i, &a)| {
            let rest = r - i;
            a + cdf[rest.min(cdf.len() - 1)]
        }));
        tables.ln_choose(n, t) - ln_norm + ln_success
    });
    let ln_q = logsumexp(terms).min(0.0);
    Ok(ln_q / n as f64)
}
