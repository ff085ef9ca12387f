//! One-dimensional root finding and maximization.

/// Root of an increasing function on `[lo, hi]` by bisection.
///
/// Assumes `f(lo) ≤ 0 ≤ f(hi)`; stops once the bracket is narrower than `tol`.
pub fn bisect_increasing(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Location and value of an extremum.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Extremum {
    pub w: f64,
    pub value: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Extremum {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        Extremum { w: c, value: fc }
    } else {
        Extremum { w: d, value: fd }
    }
}

pub fn golden_min(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Extremum {
    let e = golden_max(|x| -f(x), a, b, tol);
    Extremum {
        w: e.w,
        value: -e.value,
    }
}

/// Maximum of `f` over `[a, b]`: scan `points` evenly spaced nodes, then
/// refine by golden section between the neighbours of the best node.
///
/// The best grid node is kept if refinement does not improve on it, so the
/// result never falls below the grid maximum.
pub fn grid_max(f: impl Fn(f64) -> f64 + Sync, a: f64, b: f64, points: usize, tol: f64) -> Extremum {
    use rayon::prelude::*;
    assert!(points >= 2 && b > a);
    let step = (b - a) / (points - 1) as f64;
    let values: Vec<f64> = (0..points)
        .into_par_iter()
        .map(|i| f(node(a, b, step, i, points)))
        .collect();
    let (best, &best_value) =
        values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_nan())
            .fold(
                (0, &f64::NEG_INFINITY),
                |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc },
            );
    let grid = Extremum {
        w: node(a, b, step, best, points),
        value: best_value,
    };
    let lo = node(a, b, step, best.saturating_sub(1), points);
    let hi = node(a, b, step, (best + 1).min(points - 1), points);
    let refined = golden_max(&f, lo, hi, tol);
    if refined.value > grid.value {
        refined
    } else {
        grid
    }
}

fn node(a: f64, b: f64, step: f64, i: usize, points: usize) -> f64 {
    if i + 1 == points {
        b
    } else {
        a + step * i as f64
    }
}
