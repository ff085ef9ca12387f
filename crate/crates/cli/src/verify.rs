//! Verification suites behind `ccodes verify`.

use std::collections::HashMap;

use compound_codes::analysis::optimize::{bisect_increasing, golden_min};
use compound_codes::analysis::{
    binary_entropy, channel_exponent_l_tilde, delta_fun, derivative_checks, exact_overlap_log_prob, format_sig,
    ldpc_enum_bound_b, overlap_chernoff_objective, overlap_exponent_f, overlap_lambda_star, rd_min_rate,
    rd_objective_k, smallest_passing_degree, LowerCode, DEFAULT_ENDPOINT_BAND,
};
use compound_codes::codec::moment_experiment;
use compound_codes::ensembles::AssembleOptions;
use compound_codes::{BitVector, CompoundCode, EnsembleParams};
use serde::Serialize;
use serde_json::json;

use crate::args::{Common, Suite};
use crate::{json_bytes, CliError, Report};

/// One numeric check with its margin: positive margin means it passed with
/// room to spare.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub target: Option<f64>,
    pub tolerance: f64,
    pub margin: f64,
    pub passed: bool,
}

impl Check {
    /// `|measured − target| < tolerance`.
    pub fn near(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        let margin = tolerance - (measured - target).abs();
        Check {
            name: name.into(),
            measured,
            target: Some(target),
            tolerance,
            margin,
            passed: margin > 0.0,
        }
    }

    /// `measured == target` bit for bit.
    pub fn exact(name: impl Into<String>, measured: f64, target: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            target: Some(target),
            tolerance: 0.0,
            margin: -(measured - target).abs(),
            passed: measured == target,
        }
    }

    /// `measured < bound`.
    pub fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            target: Some(bound),
            tolerance: 0.0,
            margin: bound - measured,
            passed: measured < bound,
        }
    }

    /// `measured > bound`.
    pub fn above(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            target: Some(bound),
            tolerance: 0.0,
            margin: measured - bound,
            passed: measured > bound,
        }
    }

    /// A count that must be zero.
    pub fn none(name: impl Into<String>, count: usize) -> Self {
        Check {
            name: name.into(),
            measured: count as f64,
            target: Some(0.0),
            tolerance: 0.0,
            margin: -(count as f64),
            passed: count == 0,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            measured: ok as u8 as f64,
            target: Some(1.0),
            tolerance: 0.0,
            margin: if ok { 0.0 } else { -1.0 },
            passed: ok,
        }
    }
}

pub(crate) fn run_suite(common: &Common, suite: Suite) -> Result<Report, CliError> {
    let checks = match suite {
        Suite::Exponents => exponents(common.grid)?,
        Suite::Derivatives => derivatives(),
        Suite::Moments => moments(common.seed, common.trials.unwrap_or(10_000))?,
        Suite::Overlap => overlap()?,
        Suite::Partition => partition(common.seed)?,
    };
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut text = String::new();
    let mut csv = String::from("check,measured,target,tolerance,margin,passed\n");
    for c in &checks {
        text.push_str(&format!(
            "{} {} (measured {}, margin {})\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            format_sig(c.measured),
            format_sig(c.margin)
        ));
        csv.push_str(&format!(
            "\"{}\",{},{},{},{},{}\n",
            c.name,
            format_sig(c.measured),
            c.target.map(format_sig).unwrap_or_default(),
            format_sig(c.tolerance),
            format_sig(c.margin),
            c.passed
        ));
    }
    text.push_str(&format!(
        "{} of {} checks passed\n",
        checks.len() - failed,
        checks.len()
    ));
    let summary = json!({"checks": checks, "passed": checks.len() - failed, "failed": failed});
    Ok(Report {
        files: vec![
            ("checks.csv".into(), csv.into_bytes()),
            ("summary.json".into(), json_bytes(&summary)),
        ],
        summary,
        text,
        inputs: Vec::new(),
        failed: failed > 0,
    })
}

/// Closed-form anchors of the exponents and bounds.
pub fn exponents(grid: usize) -> Result<Vec<Check>, CliError> {
    let mut checks = vec![
        Check::near("1 - h(0.11)", 1.0 - binary_entropy(0.11)?, 0.50009, 1e-4),
        Check::near("1 - h(0.316)", 1.0 - binary_entropy(0.316)?, 0.09997, 1e-4),
    ];
    for d in [0.05, 0.11, 0.25, 0.316] {
        checks.push(Check::exact(format!("F(0; {d})"), overlap_exponent_f(0.0, d)?, 0.0));
        checks.push(Check::near(
            format!("F(1/2; {d}) + 1 - h(D)"),
            overlap_exponent_f(0.5, d)? + 1.0 - binary_entropy(d)?,
            0.0,
            1e-10,
        ));
    }

    // saddle point against direct minimization of the Chernoff objective
    let (mut value_gap, mut root_gap) = (0.0f64, 0.0f64);
    for d in [0.05, 0.11, 0.25, 0.316] {
        for i in 1..=20 {
            let t = 0.025 * i as f64;
            let closed = overlap_lambda_star(t, d)?;
            let numeric = golden_min(|l| overlap_chernoff_objective(t, d, l), -60.0, 0.0, 1e-12);
            value_gap = value_gap.max((numeric.value - closed.value).abs());
            let root = bisect_increasing(|l| chernoff_slope(t, d, l), -60.0, 0.0, 1e-14);
            root_gap = root_gap.max((root - closed.lambda_star).abs());
        }
    }
    checks.push(Check::near(
        "saddle value vs golden section, 20x4 grid",
        value_gap,
        0.0,
        1e-8,
    ));
    checks.push(Check::near(
        "saddle point vs slope bisection, 20x4 grid",
        root_gap,
        0.0,
        1e-8,
    ));

    for (dv, dc) in [(3usize, 6usize), (4, 8), (5, 10)] {
        let r_h = 1.0 - dv as f64 / dc as f64;
        checks.push(Check::near(
            format!("B(1/2) = R_H for ({dv},{dc})"),
            ldpc_enum_bound_b(0.5, dv, dc)?,
            r_h,
            1e-10,
        ));
    }
    let mut asym = 0.0f64;
    for i in 0..500 {
        let w = i as f64 / 499.0;
        asym = asym.max((ldpc_enum_bound_b(w, 3, 6)? - ldpc_enum_bound_b(1.0 - w, 3, 6)?).abs());
    }
    checks.push(Check::near("B(w) - B(1-w), 500 points, (3,6)", asym, 0.0, 1e-10));
    let mut near_zero = f64::NEG_INFINITY;
    for i in 1..=200 {
        near_zero = near_zero.max(ldpc_enum_bound_b(0.02 * i as f64 / 200.0, 3, 6)?);
    }
    checks.push(Check::below("max B on (0, 0.02], (3,6)", near_zero, 0.0));

    let ldpc = LowerCode::ldpc(3, 6)?;
    for d in [0.11, 0.316] {
        let shannon = 1.0 - binary_entropy(d)?;
        let uncoded = rd_min_rate(d, 4, LowerCode::Uncoded, grid, DEFAULT_ENDPOINT_BAND)?;
        checks.push(Check::above(
            format!("uncoded max ratio - (1 - h({d})), d_top 4"),
            uncoded.value - shannon,
            0.01,
        ));
        let compound = rd_min_rate(d, 4, ldpc, grid, DEFAULT_ENDPOINT_BAND)?;
        checks.push(Check::near(
            format!("compound (3,6) max ratio at D = {d}"),
            compound.value,
            shannon,
            1e-6,
        ));
        let at_zero = rd_objective_k(0.0, d, 0.0, 4, ldpc)?.ratio.unwrap_or(f64::NAN);
        checks.push(Check::near(
            format!("compound (3,6) ratio at w = 0, D = {d}"),
            at_zero,
            shannon,
            1e-12,
        ));
    }

    let p = 0.08;
    let found = smallest_passing_degree(p, ldpc, 1.0, 1..=32, grid)?;
    checks.push(Check::holds(
        format!(
            "channel condition at R = 0.5, p = {p}: some d_top <= 32 (found {})",
            found.map(|(d, _)| d.to_string()).unwrap_or_else(|| "none".into())
        ),
        found.is_some(),
    ));
    let above_capacity = 1.0 - binary_entropy(p)? + 0.01;
    checks.push(Check::above(
        format!("L~(1/2) at R = capacity + 0.01, p = {p}"),
        channel_exponent_l_tilde(0.5, p, 4, above_capacity)?,
        0.0,
    ));
    Ok(checks)
}

/// Slope in `λ` of the Chernoff objective, written out independently of the
/// library's quadratic.
fn chernoff_slope(t: f64, d: f64, l: f64) -> f64 {
    let e = l.exp();
    d * (1.0 - t) * e / ((1.0 - t) * e + t) + (1.0 - d) * t * e / ((1.0 - t) + t * e) - d
}

pub fn derivatives() -> Vec<Check> {
    derivative_checks()
        .checks
        .into_iter()
        .map(|c| match c.expected {
            Some(target) => Check::near(c.name, c.measured, target, c.tolerance),
            None => Check::below(c.name, c.measured, 0.0),
        })
        .collect()
}

/// Second-moment decomposition on a small ensemble.
pub fn moments(seed: u64, trials: usize) -> Result<Vec<Check>, CliError> {
    let params = EnsembleParams::new(20, 10, 5, 3, 3, 6, seed)?;
    let batch = (trials / 10).max(1);
    let est = moment_experiment(&params, 0.2, trials, batch)?;
    Ok(vec![
        Check::near(
            format!(
                "E[T^2] = {} vs decomposition {} (z-score)",
                format_sig(est.mean_t_squared),
                format_sig(est.decomposition_rhs)
            ),
            est.z_score,
            0.0,
            3.0,
        ),
        Check::holds(
            format!("E[T^2] >= E[T]^2 in every batch of {batch}"),
            est.ordering_held_in_every_batch,
        ),
    ])
}

/// Exact finite-length overlap exponent against its limit.
pub fn overlap() -> Result<Vec<Check>, CliError> {
    let (w, d, d_top) = (0.3, 0.11, 4);
    let limit = overlap_exponent_f(delta_fun(w, d_top)?, d)? * std::f64::consts::LN_2;
    let mut checks = Vec::new();
    let mut previous: Option<f64> = None;
    for n in [100usize, 200, 400, 800] {
        let gap = (exact_overlap_log_prob(n, w, d, d_top)? - limit).abs();
        if let Some(prev) = previous {
            checks.push(Check::below(format!("|gap| at n = {n} below n = {}", n / 2), gap, prev));
        }
        previous = Some(gap);
    }
    checks.push(Check::below(
        "|gap| at n = 800, nats",
        previous.unwrap_or(f64::NAN),
        0.02,
    ));
    Ok(checks)
}

/// Exhaustive check that the lower-check cosets partition the base code.
pub fn partition(seed: u64) -> Result<Vec<Check>, CliError> {
    let params = EnsembleParams::new(16, 12, 9, 3, 3, 4, seed)?;
    let options = AssembleOptions {
        k1: 4,
        k2: Some(3),
        require_injective: false,
    };
    let code = CompoundCode::assemble_seeded(&params, &options)?;
    let (h1, h2) = (code.h1(), code.h2());
    let m = code.m();

    // brute force over every information word
    let mut by_syndrome: HashMap<BitVector, Vec<BitVector>> = HashMap::new();
    let mut base = 0usize;
    for bits in 0u64..(1 << m) {
        let y = BitVector::from_bools(&(0..m).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>());
        if h1.matvec(&y)?.is_zero() {
            base += 1;
            by_syndrome.entry(h2.matvec(&y)?).or_default().push(y);
        }
    }

    let mut seen: HashMap<BitVector, usize> = HashMap::new();
    let mut mismatched = 0;
    let mut sizes = Vec::new();
    for s in 0u64..(1 << code.k2()) {
        let syndrome = BitVector::from_bools(&(0..code.k2()).map(|i| s >> i & 1 == 1).collect::<Vec<_>>());
        let mut members = match code.coset(&syndrome)? {
            Some(space) => span(&space.offset, &space.basis),
            None => Vec::new(),
        };
        for y in &members {
            *seen.entry(y.clone()).or_default() += 1;
        }
        let mut expected = by_syndrome.get(&syndrome).cloned().unwrap_or_default();
        members.sort_by_key(|v| v.to_string());
        expected.sort_by_key(|v| v.to_string());
        mismatched += usize::from(members != expected);
        if !members.is_empty() {
            sizes.push(members.len());
        }
    }
    let overlaps = seen.values().filter(|&&c| c > 1).count();
    let covered = seen.len();
    Ok(vec![
        Check::none("information words in more than one coset", overlaps),
        Check::none("cosets differing from brute force", mismatched),
        Check::exact("size of the union vs |null(H1)|", covered as f64, base as f64),
        Check::exact(
            "|null(H1)| vs 2^dim from elimination",
            base as f64,
            (1u64 << code.null_basis_h1().len()) as f64,
        ),
        Check::holds(
            format!("nonempty cosets share one size ({} cosets)", sizes.len()),
            sizes.windows(2).all(|w| w[0] == w[1]),
        ),
    ])
}

fn span(offset: &BitVector, basis: &[BitVector]) -> Vec<BitVector> {
    let mut out = vec![offset.clone()];
    for b in basis {
        let shifted: Vec<BitVector> = out.iter().map(|v| v ^ b).collect();
        out.extend(shifted);
    }
    out
}
