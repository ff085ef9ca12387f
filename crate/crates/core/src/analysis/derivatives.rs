//! Finite-difference checks of the behaviour of the exponents at `w = 1/2`.

use serde::{Deserialize, Serialize};

use super::bounds::channel_l_tilde_nats;
use super::entropy::delta;
use super::enumerator::enum_bound_nats;
use super::overlap::overlap_f_nats;

/// One finite-difference measurement against its target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub name: String,
    pub measured: f64,
    /// Target value, or `None` for a sign-only check.
    pub expected: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub checks: Vec<DerivativeCheck>,
}

impl DerivativeReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Step for central differences around 1/2.
pub const FD_STEP: f64 = 1e-4;

pub fn first_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

pub fn second_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

fn absolute(name: String, measured: f64, expected: f64, tolerance: f64) -> DerivativeCheck {
    DerivativeCheck {
        passed: (measured - expected).abs() < tolerance,
        name,
        measured,
        expected: Some(expected),
        tolerance,
    }
}

/// Runs the full suite, all derivatives in nats:
///
/// * `G(w) = F(δ(w; d), D)` has `G'(1/2) = G''(1/2) = 0` for even `d ≥ 4`;
/// * `L̃'(1/2) = 0` and `L̃''(1/2) = −4R`;
/// * `B'(1/2) = 0` and `B''(1/2) < 0`.
pub fn derivative_checks() -> DerivativeReport {
    let h = FD_STEP;
    let d = 0.11;
    let mut checks = Vec::new();
    for d_top in [4usize, 6] {
        let g = |w: f64| overlap_f_nats(delta(w, d_top), d);
        checks.push(absolute(
            format!("G'(1/2), d_top={d_top}, D={d}"),
            first_difference(g, 0.5, h),
            0.0,
            1e-5,
        ));
        checks.push(absolute(
            format!("G''(1/2), d_top={d_top}, D={d}"),
            second_difference(g, 0.5, h),
            0.0,
            1e-5,
        ));
    }
    let p = 0.11;
    for rate in [0.3, 0.5] {
        let lt = |w: f64| channel_l_tilde_nats(w, p, 4, rate);
        checks.push(absolute(
            format!("L~'(1/2), R={rate}, p={p}"),
            first_difference(lt, 0.5, h),
            0.0,
            1e-6,
        ));
        let second = second_difference(lt, 0.5, h);
        checks.push(absolute(
            format!("L~''(1/2), R={rate}, p={p}"),
            second,
            -4.0 * rate,
            1e-3 * 4.0 * rate,
        ));
    }
    for (dv, dc) in [(3usize, 6usize), (4, 8), (5, 10)] {
        let b = |w: f64| enum_bound_nats(w, dv, dc);
        checks.push(absolute(
            format!("B'(1/2), ({dv},{dc})"),
            first_difference(b, 0.5, h),
            0.0,
            1e-6,
        ));
        let second = second_difference(b, 0.5, h);
        checks.push(DerivativeCheck {
            name: format!("B''(1/2) < 0, ({dv},{dc})"),
            measured: second,
            expected: None,
            tolerance: 0.0,
            passed: second < 0.0,
        });
    }
    DerivativeReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let report = derivative_checks();
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
        assert_eq!(report.checks.len(), 4 + 4 + 6);
    }

    #[test]
    fn differences_on_known_function() {
        assert!((first_difference(f64::sin, 0.0, 1e-4) - 1.0).abs() < 1e-8);
        assert!((second_difference(|x| x * x * x, 1.0, 1e-3) - 6.0).abs() < 1e-5);
    }
}
