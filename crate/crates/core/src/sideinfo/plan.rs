use serde::{Deserialize, Serialize};

use crate::analysis::binary_entropy;
use crate::ensembles::CompoundCode;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideInfoMode {
    /// Lossy compression with side information at the decoder (Wyner-Ziv).
    Scsi,
    /// Channel coding with interference known at the encoder (Gelfand-Pinsker).
    Ccsi,
}

/// Integer allocation `(n, m, k1, k2)` for a nested compound code.
///
/// In both modes the source-coding code is the one with more information
/// words per syndrome class: for SCSI the quantizer is `{H1 y = 0}` with
/// rate `r1 = (m − k1)/n` and the channel code is each coset, rate
/// `r2 = (m − k1 − k2)/n`; for CCSI the quantizer is each coset, rate
/// `r1 = (m − k1 − k2)/n`, and the channel code is `{H1 y = 0}`, rate
/// `r2 = (m − k1)/n`. Either way `r_trans = k2/n = |r1 − r2|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePlan {
    pub mode: SideInfoMode,
    /// Distortion `D` (SCSI) or channel-input weight budget `w` (CCSI).
    pub target: f64,
    /// Crossover probability of the side-information or host channel.
    pub p: f64,
    pub epsilon: f64,
    pub n: usize,
    pub m: usize,
    pub k1: usize,
    pub k2: usize,
    pub r1: f64,
    pub r2: f64,
    pub r_trans: f64,
    /// Rate `r1` aims at before rounding.
    pub target_r1: f64,
    /// Rate `r2` aims at before rounding.
    pub target_r2: f64,
    /// `h(D∗p) − h(D)` (SCSI) or `h(w) − h(p)` (CCSI).
    pub analytic_branch: f64,
    /// `r1 − r2` for SCSI (`analytic_branch + ε`, a rate to pay) or
    /// `r2 − r1` for CCSI (`analytic_branch − ε`, a rate to earn), before
    /// rounding.
    pub target_r_trans: f64,
    /// `r_trans − target_r_trans`.
    pub rate_gap: f64,
}

fn h(x: f64) -> f64 {
    binary_entropy(x).expect("probability checked by caller")
}

fn targets(mode: SideInfoMode, target: f64, p: f64, epsilon: f64) -> Result<(f64, f64, f64)> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::domain("epsilon", epsilon, "[0, ∞)"));
    }
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::domain("p", p, "[0, 1/2]"));
    }
    Ok(match mode {
        SideInfoMode::Scsi => {
            if !(target > 0.0 && target < 0.5) {
                return Err(Error::domain("D", target, "(0, 1/2)"));
            }
            let dp = crate::analysis::bernoulli_convolve(target, p)?;
            (
                1.0 - h(target) + epsilon / 2.0,
                1.0 - h(dp) - epsilon / 2.0,
                h(dp) - h(target),
            )
        }
        SideInfoMode::Ccsi => {
            if !(target > 0.0 && target <= 0.5) {
                return Err(Error::domain("w", target, "(0, 1/2]"));
            }
            (
                1.0 - h(target) + epsilon / 2.0,
                1.0 - h(p) - epsilon / 2.0,
                h(target) - h(p),
            )
        }
    })
}

impl RatePlan {
    fn assemble(
        mode: SideInfoMode,
        target: f64,
        p: f64,
        epsilon: f64,
        (n, m, k1, k2): (usize, usize, usize, usize),
        (target_r1, target_r2, analytic_branch): (f64, f64, f64),
    ) -> Self {
        let nf = n as f64;
        let (r1, r2) = match mode {
            SideInfoMode::Scsi => ((m - k1) as f64 / nf, (m - k1 - k2) as f64 / nf),
            SideInfoMode::Ccsi => ((m - k1 - k2) as f64 / nf, (m - k1) as f64 / nf),
        };
        let r_trans = k2 as f64 / nf;
        let target_r_trans = match mode {
            SideInfoMode::Scsi => target_r1 - target_r2,
            SideInfoMode::Ccsi => target_r2 - target_r1,
        };
        RatePlan {
            mode,
            target,
            p,
            epsilon,
            n,
            m,
            k1,
            k2,
            r1,
            r2,
            r_trans,
            target_r1,
            target_r2,
            analytic_branch,
            target_r_trans,
            rate_gap: r_trans - target_r_trans,
        }
    }

    /// Plan describing an existing code under the given operating point.
    pub fn for_code(mode: SideInfoMode, code: &CompoundCode, target: f64, p: f64, epsilon: f64) -> Result<Self> {
        let t = targets(mode, target, p, epsilon)?;
        Ok(Self::assemble(
            mode,
            target,
            p,
            epsilon,
            (code.n(), code.m(), code.k1(), code.k2()),
            t,
        ))
    }

    /// Checks that `code` has the dimensions and partition of this plan.
    pub fn check_code(&self, code: &CompoundCode) -> Result<()> {
        let want = (self.n, self.m, self.k1, self.k2);
        let have = (code.n(), code.m(), code.k1(), code.k2());
        if want != have {
            return Err(Error::InvalidParams(format!(
                "code (n, m, k1, k2) = {have:?} does not match the plan {want:?}"
            )));
        }
        Ok(())
    }

    /// Sum of the per-rate rounding errors, bits.
    pub fn rounding_residual(&self) -> f64 {
        (self.r1 - self.target_r1).abs() + (self.r2 - self.target_r2).abs()
    }
}

fn round_rate(rate: f64, n: usize) -> i64 {
    (rate * n as f64).round() as i64
}

/// SCSI allocation at blocklength `n` with `m = n`:
/// `m − k1 = round((1 − h(D) + ε/2) n)` and
/// `m − k1 − k2 = round((1 − h(D∗p) − ε/2) n)`, the latter floored at zero
/// (when `D∗p` is near 1/2 the side information carries nothing).
pub fn plan_rates_scsi(d: f64, p: f64, epsilon: f64, n: usize) -> Result<RatePlan> {
    plan_rates_scsi_with_m(d, p, epsilon, n, n)
}

pub fn plan_rates_scsi_with_m(d: f64, p: f64, epsilon: f64, n: usize, m: usize) -> Result<RatePlan> {
    let t = targets(SideInfoMode::Scsi, d, p, epsilon)?;
    let source = round_rate(t.0, n);
    let channel = round_rate(t.1, n).max(0);
    allocate(SideInfoMode::Scsi, d, p, epsilon, n, m, source, channel, t)
}

/// CCSI allocation at blocklength `n` with `m = n`:
/// `m − k1 = round((1 − h(p) − ε/2) n)` and
/// `m − k1 − k2 = round((1 − h(w) + ε/2) n)`.
pub fn plan_rates_ccsi(w: f64, p: f64, epsilon: f64, n: usize) -> Result<RatePlan> {
    plan_rates_ccsi_with_m(w, p, epsilon, n, n)
}

pub fn plan_rates_ccsi_with_m(w: f64, p: f64, epsilon: f64, n: usize, m: usize) -> Result<RatePlan> {
    let t = targets(SideInfoMode::Ccsi, w, p, epsilon)?;
    let channel = round_rate(t.1, n);
    let source = round_rate(t.0, n);
    allocate(SideInfoMode::Ccsi, w, p, epsilon, n, m, channel, source, t)
}

/// `outer = m − k1` and `inner = m − k1 − k2`.
#[allow(clippy::too_many_arguments)]
fn allocate(
    mode: SideInfoMode,
    target: f64,
    p: f64,
    epsilon: f64,
    n: usize,
    m: usize,
    outer: i64,
    inner: i64,
    t: (f64, f64, f64),
) -> Result<RatePlan> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParams("n and m must be positive".into()));
    }
    let (outer_name, inner_name) = match mode {
        SideInfoMode::Scsi => ("source rate r1", "channel rate r2"),
        SideInfoMode::Ccsi => ("channel rate r2", "source rate r1"),
    };
    if inner < 0 {
        return Err(Error::InvalidParams(format!(
            "{inner_name} rounds to a negative count {inner}"
        )));
    }
    if outer < inner {
        return Err(Error::InvalidParams(format!(
            "k2 = {} is negative: {outer_name}·n = {outer} < {inner_name}·n = {inner}",
            outer - inner
        )));
    }
    if outer as usize > m {
        return Err(Error::InvalidParams(format!(
            "k1 = m − {outer} is negative for m = {m}: {outer_name} exceeds m/n"
        )));
    }
    let k1 = m - outer as usize;
    let k2 = (outer - inner) as usize;
    Ok(RatePlan::assemble(mode, target, p, epsilon, (n, m, k1, k2), t))
}

/// `h(D∗p) − h(D)`, bits.
pub fn wyner_ziv_branch(d: f64, p: f64) -> Result<f64> {
    Ok(targets(SideInfoMode::Scsi, d, p, 0.0)?.2)
}

/// `h(w) − h(p)`, bits.
pub fn embedding_branch(w: f64, p: f64) -> Result<f64> {
    Ok(targets(SideInfoMode::Ccsi, w, p, 0.0)?.2)
}
