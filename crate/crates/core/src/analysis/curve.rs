//! Sampled exponent and bound curves, with CSV/JSON export.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::bounds::{channel_l_nats, rd_ratio_nats, LowerCode};
use super::entropy::delta;
use super::enumerator::enum_bound_nats;
use super::overlap::overlap_f_nats;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Bits,
    Nats,
}

impl Units {
    pub fn as_str(self) -> &'static str {
        match self {
            Units::Bits => "bits",
            Units::Nats => "nats",
        }
    }
}

/// Values of a function of `w` on an increasing grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentCurve {
    pub w: Vec<f64>,
    pub values: Vec<f64>,
    pub units: Units,
    pub metadata: BTreeMap<String, Value>,
}

/// `points` evenly spaced values from `a` to `b` inclusive.
pub fn uniform_grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let last = (points - 1) as f64;
            (0..points)
                .map(|i| {
                    if i + 1 == points {
                        b
                    } else {
                        a + (b - a) * i as f64 / last
                    }
                })
                .collect()
        }
    }
}

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros dropped,
/// scientific notation outside `[1e-5, 1e12)`.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl ExponentCurve {
    pub fn new(w: Vec<f64>, values: Vec<f64>, units: Units) -> Result<Self> {
        if w.len() != values.len() {
            return Err(Error::DimensionMismatch {
                context: "curve values against grid",
                expected: w.len(),
                found: values.len(),
            });
        }
        if w.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidParams("curve grid must be strictly increasing".into()));
        }
        Ok(ExponentCurve {
            w,
            values,
            units,
            metadata: BTreeMap::new(),
        })
    }

    /// Samples `f` (which returns nats) on `grid` and reports bits.
    fn sample_bits(grid: Vec<f64>, f: impl Fn(f64) -> f64 + Sync) -> Result<Self> {
        let values = grid.par_iter().map(|&w| f(w) / LN_2).collect();
        Self::new(grid, values, Units::Bits)
    }

    pub fn with_meta(mut self, key: &str, value: Value) -> Self {
        self.metadata.insert(key.to_string(), value);
        self
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Largest value and where it occurs.
    pub fn max(&self) -> Option<(f64, f64)> {
        self.w.iter().zip(&self.values).filter(|(_, v)| v.is_finite()).fold(
            None,
            |best: Option<(f64, f64)>, (&w, &v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((w, v)),
            },
        )
    }

    /// CSV with header `w,value,units`, values at 12 significant digits.
    pub fn to_csv(&self) -> String {
        let units = self.units.as_str();
        let mut out = String::from("w,value,units\n");
        for (w, v) in self.w.iter().zip(&self.values) {
            out.push_str(&format!("{},{},{units}\n", format_sig(*w), format_sig(*v)));
        }
        out
    }

    /// Sidecar describing the curve: metadata plus grid size and units.
    pub fn metadata_json(&self) -> Value {
        let mut meta: serde_json::Map<String, Value> = self.metadata.clone().into_iter().collect();
        meta.insert("grid_points".into(), json!(self.len()));
        meta.insert("units".into(), json!(self.units.as_str()));
        Value::Object(meta)
    }
}

fn lower_meta(lower: LowerCode) -> Value {
    serde_json::to_value(lower).expect("lower code serializes")
}

/// Rate ratio `(1 − h(D) + F(δ(w), D)) / (1 − B(w)/R_H)` on `[0, 1/2 − band]`.
pub fn rd_ratio_curve(d: f64, d_top: usize, lower: LowerCode, grid: usize, band: f64) -> Result<ExponentCurve> {
    super::bounds::rd_objective_k(0.0, d, 0.0, d_top, lower)?;
    let curve = ExponentCurve::sample_bits(uniform_grid(0.0, 0.5 - band, grid), |w| {
        rd_ratio_nats(w, d, d_top, lower)
    })?;
    Ok(curve
        .with_meta("quantity", json!("rate_ratio"))
        .with_meta("D", json!(d))
        .with_meta("d_top", json!(d_top))
        .with_meta("lower_code", lower_meta(lower))
        .with_meta("endpoint_band", json!(band)))
}

/// `F(δ(w; d_top), D)` on `[0, 1/2]`.
pub fn overlap_curve(d: f64, d_top: usize, grid: usize) -> Result<ExponentCurve> {
    super::overlap::overlap_exponent_f(0.0, d)?;
    if d_top == 0 {
        return Err(Error::InvalidParams("d_top must be at least 1".into()));
    }
    let curve = ExponentCurve::sample_bits(uniform_grid(0.0, 0.5, grid), |w| {
        overlap_f_nats(delta(w, d_top).min(0.5), d)
    })?;
    Ok(curve
        .with_meta("quantity", json!("overlap_exponent"))
        .with_meta("D", json!(d))
        .with_meta("d_top", json!(d_top)))
}

/// `B(w; dv, dc′)` on `[0, 1]`. An even `grid` is bumped to the next odd
/// count so that the peak at `w = 1/2` is a grid point.
pub fn enum_curve(dv: usize, dc_prime: usize, grid: usize) -> Result<ExponentCurve> {
    super::enumerator::ldpc_enum_bound_b(0.5, dv, dc_prime)?;
    let points = grid.max(3) | 1;
    let curve = ExponentCurve::sample_bits(uniform_grid(0.0, 1.0, points), |w| enum_bound_nats(w, dv, dc_prime))?;
    Ok(curve
        .with_meta("quantity", json!("ldpc_enumerator_bound"))
        .with_meta("dv", json!(dv))
        .with_meta("dc_prime", json!(dc_prime)))
}

/// `L(w)` on `(0, 1/2]`, starting at `1/(2·grid)`.
pub fn channel_curve(p: f64, d_top: usize, lower: LowerCode, r_g: f64, grid: usize) -> Result<ExponentCurve> {
    super::bounds::channel_exponent_l(0.5, p, d_top, lower, r_g)?;
    let lo = 0.5 / grid.max(1) as f64;
    let curve = ExponentCurve::sample_bits(uniform_grid(lo, 0.5, grid), |w| channel_l_nats(w, p, d_top, lower, r_g))?;
    Ok(curve
        .with_meta("quantity", json!("channel_exponent"))
        .with_meta("p", json!(p))
        .with_meta("d_top", json!(d_top))
        .with_meta("lower_code", lower_meta(lower))
        .with_meta("r_g", json!(r_g)))
}
