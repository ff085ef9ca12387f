//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! fails. Tolerances and time budgets are fixed here.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::LN_2;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use compound_codes::analysis::{
    binary_entropy, channel_exponent_l_tilde, delta_fun, exact_overlap_log_prob, ldpc_enum_bound_b,
    overlap_chernoff_objective, overlap_exponent_f, overlap_lambda_star, rd_min_rate, rd_objective_k,
    smallest_passing_degree, LowerCode, DEFAULT_ENDPOINT_BAND, DEFAULT_GRID,
};
use compound_codes::codec::{ball_probability, moment_experiment, Decoder};
use compound_codes::ensembles::AssembleOptions;
use compound_codes::sideinfo::{
    plan_rates_ccsi, plan_rates_scsi, run_ccsi_batch, run_scsi_batch, BatchSummary, PipelineTrace, RatePlan,
    SideInfoMode,
};
use compound_codes::{BitVector, CompoundCode, EnsembleParams, SparseBitMatrix};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "capacity and rate-distortion anchors",
            budget: Duration::from_millis(1),
            run: shannon_anchors,
        },
        Criterion {
            id: 2,
            name: "overlap exponent sentinels and saddle point",
            budget: Duration::from_secs(1),
            run: exponent_sentinels,
        },
        Criterion {
            id: 3,
            name: "LDPC enumerator bound",
            budget: Duration::from_secs(1),
            run: enumerator_bound,
        },
        Criterion {
            id: 4,
            name: "rate-ratio curve maxima",
            budget: Duration::from_secs(10),
            run: rate_ratio_maxima,
        },
        Criterion {
            id: 5,
            name: "derivatives at w = 1/2",
            budget: Duration::from_secs(1),
            run: derivative_suite,
        },
        Criterion {
            id: 6,
            name: "finite-length overlap convergence",
            budget: Duration::from_secs(30),
            run: overlap_convergence,
        },
        Criterion {
            id: 7,
            name: "channel coding condition",
            budget: Duration::from_secs(10),
            run: channel_condition,
        },
        Criterion {
            id: 8,
            name: "second-moment decomposition",
            budget: Duration::from_secs(120),
            run: second_moment,
        },
        Criterion {
            id: 9,
            name: "nested coset partition",
            budget: Duration::from_secs(5),
            run: nested_partition,
        },
        Criterion {
            id: 10,
            name: "decoder side information end to end",
            budget: Duration::from_secs(120),
            run: scsi_end_to_end,
        },
        Criterion {
            id: 11,
            name: "encoder side information end to end",
            budget: Duration::from_secs(120),
            run: ccsi_end_to_end,
        },
        Criterion {
            id: 12,
            name: "manifest replay determinism",
            budget: Duration::from_secs(120),
            run: replay_determinism,
        },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; took {elapsed:.2?}, budget {:?}", c.budget)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {}: {detail} ({elapsed:.2?})", c.id, c.name),
            Err(detail) => {
                failures += 1;
                println!("FAIL [{:>2}] {}: {detail} ({elapsed:.2?})", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Binary entropy in bits, written out directly.
fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn shannon_anchors() -> Outcome {
    let a = 1.0 - binary_entropy(0.11).map_err(err)?;
    let b = 1.0 - binary_entropy(0.316).map_err(err)?;
    ensure((a - 0.50009).abs() < 1e-4, || format!("1 - h(0.11) = {a}"))?;
    ensure((b - 0.09997).abs() < 1e-4, || format!("1 - h(0.316) = {b}"))?;
    ensure(
        (a - (1.0 - h2(0.11))).abs() < 1e-14 && (b - (1.0 - h2(0.316))).abs() < 1e-14,
        || "library entropy disagrees with the direct formula".into(),
    )?;
    Ok(format!("1 - h(0.11) = {a:.6}, 1 - h(0.316) = {b:.6}"))
}

fn exponent_sentinels() -> Outcome {
    let ds = [0.05, 0.11, 0.25, 0.316];
    let mut worst_half = 0.0f64;
    for d in ds {
        let at_zero = overlap_exponent_f(0.0, d).map_err(err)?;
        ensure(at_zero == 0.0, || format!("F(0; {d}) = {at_zero}"))?;
        let gap = (overlap_exponent_f(0.5, d).map_err(err)? + 1.0 - h2(d)).abs();
        worst_half = worst_half.max(gap);
    }
    ensure(worst_half < 1e-10, || {
        format!("|F(1/2; D) + 1 - h(D)| = {worst_half:e}")
    })?;

    // objective written out here, minimized by golden section; the stationary
    // point located by bisection on its derivative
    let objective = |t: f64, d: f64, l: f64| {
        let e = l.exp();
        d * ((1.0 - t) * e + t).ln() + (1.0 - d) * ((1.0 - t) + t * e).ln() - l * d
    };
    let slope = |t: f64, d: f64, l: f64| {
        let e = l.exp();
        d * (1.0 - t) * e / ((1.0 - t) * e + t) + (1.0 - d) * t * e / ((1.0 - t) + t * e) - d
    };
    let (mut value_gap, mut point_gap) = (0.0f64, 0.0f64);
    for d in ds {
        for i in 1..=20 {
            let t = 0.5 * i as f64 / 20.0;
            let closed = overlap_lambda_star(t, d).map_err(err)?;
            let (_, min) = golden_min(|l| objective(t, d, l), -60.0, 0.0, 1e-12);
            value_gap = value_gap.max((min - closed.value).abs());
            let root = bisect_root(|l| slope(t, d, l), -60.0, 0.0);
            point_gap = point_gap.max((root - closed.lambda_star).abs());
            let lib = overlap_chernoff_objective(t, d, closed.lambda_star);
            value_gap = value_gap.max((lib - objective(t, d, closed.lambda_star)).abs());
        }
    }
    ensure(value_gap < 1e-8 && point_gap < 1e-8, || {
        format!("saddle mismatch: value {value_gap:e}, point {point_gap:e}")
    })?;
    Ok(format!(
        "max |F(1/2) + 1 - h(D)| = {worst_half:.1e}, saddle value gap {value_gap:.1e}, point gap {point_gap:.1e}"
    ))
}

fn enumerator_bound() -> Outcome {
    for (dv, dc) in [(3usize, 6usize), (4, 8), (5, 10)] {
        let b = ldpc_enum_bound_b(0.5, dv, dc).map_err(err)?;
        let r_h = 1.0 - dv as f64 / dc as f64;
        ensure((b - r_h).abs() < 1e-10, || format!("B(1/2) = {b} for ({dv},{dc})"))?;
    }
    let mut asym = 0.0f64;
    for i in 0..500 {
        let w = i as f64 / 499.0;
        asym =
            asym.max((ldpc_enum_bound_b(w, 3, 6).map_err(err)? - ldpc_enum_bound_b(1.0 - w, 3, 6).map_err(err)?).abs());
    }
    ensure(asym < 1e-10, || format!("asymmetry {asym:e}"))?;
    let mut top = f64::NEG_INFINITY;
    for i in 1..=2000 {
        top = top.max(ldpc_enum_bound_b(0.02 * i as f64 / 2000.0, 3, 6).map_err(err)?);
    }
    ensure(top < 0.0, || format!("max B on (0, 0.02] = {top}"))?;
    Ok(format!("asymmetry {asym:.1e}, max B on (0, 0.02] = {top:.3e}"))
}

fn rate_ratio_maxima() -> Outcome {
    let ldpc = LowerCode::ldpc(3, 6).map_err(err)?;
    let mut notes = Vec::new();
    for d in [0.11, 0.316] {
        let shannon = 1.0 - h2(d);
        let uncoded = rd_min_rate(d, 4, LowerCode::Uncoded, DEFAULT_GRID, DEFAULT_ENDPOINT_BAND).map_err(err)?;
        ensure(uncoded.value >= shannon + 0.01, || {
            format!("uncoded max {} not 0.01 above {shannon} at D = {d}", uncoded.value)
        })?;
        let compound = rd_min_rate(d, 4, ldpc, DEFAULT_GRID, DEFAULT_ENDPOINT_BAND).map_err(err)?;
        ensure((compound.value - shannon).abs() < 1e-6, || {
            format!("compound max {} vs 1 - h(D) = {shannon} at D = {d}", compound.value)
        })?;
        // dense scan, independent of the library's grid and refinement
        let points = 20_000;
        let mut dense = f64::NEG_INFINITY;
        for i in 0..=points {
            let w = (0.5 - DEFAULT_ENDPOINT_BAND) * i as f64 / points as f64;
            let r = rd_objective_k(w, d, 0.0, 4, ldpc)
                .map_err(err)?
                .ratio
                .unwrap_or(f64::NAN);
            dense = dense.max(r);
        }
        ensure(compound.value >= dense - 1e-9, || {
            format!("refined max {} below dense scan {dense}", compound.value)
        })?;
        notes.push(format!(
            "D = {d}: uncoded {:.5}, compound {:.7}, 1 - h(D) {:.7}",
            uncoded.value, compound.value, shannon
        ));
    }
    Ok(notes.join("; "))
}

fn derivative_suite() -> Outcome {
    let h = 1e-4;
    let first = |f: &dyn Fn(f64) -> f64| (f(0.5 + h) - f(0.5 - h)) / (2.0 * h);
    let second = |f: &dyn Fn(f64) -> f64| (f(0.5 + h) - 2.0 * f(0.5) + f(0.5 - h)) / (h * h);
    let d = 0.11;
    let mut worst_g = 0.0f64;
    for d_top in [4usize, 6] {
        let g = |w: f64| overlap_exponent_f(delta_fun(w, d_top).unwrap().min(0.5), d).unwrap() * LN_2;
        let (g1, g2) = (first(&g), second(&g));
        ensure(g1.abs() < 1e-5 && g2.abs() < 1e-5, || {
            format!("G'(1/2) = {g1:e}, G''(1/2) = {g2:e} at d = {d_top}")
        })?;
        worst_g = worst_g.max(g1.abs()).max(g2.abs());
    }
    let p = 0.11;
    for rate in [0.3, 0.5] {
        let l = |w: f64| channel_exponent_l_tilde(w, p, 4, rate).unwrap() * LN_2;
        let (l1, l2) = (first(&l), second(&l));
        ensure(l1.abs() < 1e-6, || format!("L~'(1/2) = {l1:e} at R = {rate}"))?;
        let target = -4.0 * rate;
        ensure(((l2 - target) / target).abs() < 1e-3, || {
            format!("L~''(1/2) = {l2} vs {target} at R = {rate}")
        })?;
    }
    for (dv, dc) in [(3usize, 6usize), (4, 8), (5, 10)] {
        let b = |w: f64| ldpc_enum_bound_b(w, dv, dc).unwrap() * LN_2;
        let (b1, b2) = (first(&b), second(&b));
        ensure(b1.abs() < 1e-6, || format!("B'(1/2) = {b1:e} for ({dv},{dc})"))?;
        ensure(b2 < 0.0, || format!("B''(1/2) = {b2} for ({dv},{dc})"))?;
    }
    Ok(format!("max |G'|, |G''| = {worst_g:.1e}"))
}

fn overlap_convergence() -> Outcome {
    let (w, d, d_top) = (0.3, 0.11, 4);
    let limit = overlap_exponent_f(delta_fun(w, d_top).map_err(err)?, d).map_err(err)? * LN_2;
    let mut gaps = Vec::new();
    for n in [100usize, 200, 400, 800] {
        gaps.push((exact_overlap_log_prob(n, w, d, d_top).map_err(err)? - limit).abs());
    }
    ensure(gaps.windows(2).all(|g| g[1] < g[0]), || {
        format!("gaps not shrinking: {gaps:?}")
    })?;
    ensure(gaps[3] < 0.02, || format!("final gap {}", gaps[3]))?;
    Ok(format!(
        "|gap| over n = 100..800: {}",
        gaps.iter().map(|g| format!("{g:.5}")).collect::<Vec<_>>().join(", ")
    ))
}

fn channel_condition() -> Outcome {
    let p = 0.08;
    let ldpc = LowerCode::ldpc(3, 6).map_err(err)?;
    let found = smallest_passing_degree(p, ldpc, 1.0, 1..=32, DEFAULT_GRID).map_err(err)?;
    let (d_top, cond) = found.ok_or("no d_top <= 32 satisfies the condition at R = 0.5")?;
    ensure(cond.worst_value < 0.0, || format!("worst L = {}", cond.worst_value))?;
    let capacity = 1.0 - h2(p);
    for rate in [capacity + 1e-3, 0.6, 0.75] {
        let at_half = channel_exponent_l_tilde(0.5, p, d_top, rate).map_err(err)?;
        ensure(at_half > 0.0, || {
            format!("L~(1/2) = {at_half} at R = {rate} above capacity {capacity}")
        })?;
    }
    Ok(format!(
        "smallest passing d_top = {d_top} (worst L = {:.3e}); L~(1/2) > 0 above capacity",
        cond.worst_value
    ))
}

fn second_moment() -> Outcome {
    let params = EnsembleParams::new(20, 10, 5, 3, 3, 6, 2024).map_err(err)?;
    let est = moment_experiment(&params, 0.2, 10_000, 1_000).map_err(err)?;
    ensure(est.z_score.abs() < 3.0, || {
        format!(
            "E[T^2] = {} vs {} (z = {})",
            est.mean_t_squared, est.decomposition_rhs, est.z_score
        )
    })?;
    ensure(est.ordering_held_in_every_batch, || {
        "E[T^2] < E[T]^2 in some batch".into()
    })?;
    // probability of the radius-4 ball, summed directly
    let mut ball = 0.0;
    let mut c = 1.0;
    for t in 0..=4u32 {
        ball += c;
        c = c * (20 - t) as f64 / (t + 1) as f64;
    }
    ball /= (1u64 << 20) as f64;
    ensure((ball_probability(20, 4) - ball).abs() < 1e-15, || {
        format!("ball probability {}", ball_probability(20, 4))
    })?;
    Ok(format!(
        "E[T^2] = {:.4}, decomposition {:.4}, z = {:.2}",
        est.mean_t_squared, est.decomposition_rhs, est.z_score
    ))
}

fn bits_of(value: u64, len: usize) -> BitVector {
    BitVector::from_bools(&(0..len).map(|i| value >> i & 1 == 1).collect::<Vec<_>>())
}

/// `A v` from the row supports, without the library's product.
fn apply(a: &SparseBitMatrix, v: &BitVector) -> BitVector {
    BitVector::from_bools(
        &a.row_supports()
            .iter()
            .map(|row| row.iter().filter(|&&c| v.get(c)).count() % 2 == 1)
            .collect::<Vec<_>>(),
    )
}

fn nested_partition() -> Outcome {
    let mut sizes = Vec::new();
    for seed in 0..5 {
        let params = EnsembleParams::new(16, 12, 9, 3, 3, 4, seed).map_err(err)?;
        let opts = AssembleOptions {
            k1: 4,
            k2: Some(3),
            require_injective: false,
        };
        let code = CompoundCode::assemble_seeded(&params, &opts).map_err(err)?;
        let (h1, h2) = (code.h1(), code.h2());
        ensure(h1.rows() == 4 && h2.rows() == 3, || "wrong partition sizes".into())?;

        let mut classes: HashMap<BitVector, Vec<BitVector>> = HashMap::new();
        let mut base = 0;
        for y in 0..1u64 << 12 {
            let y = bits_of(y, 12);
            if apply(&h1, &y).is_zero() {
                base += 1;
                classes.entry(apply(&h2, &y)).or_default().push(y);
            }
        }
        let mut owner: HashMap<BitVector, u64> = HashMap::new();
        for s in 0..1u64 << 3 {
            let syndrome = bits_of(s, 3);
            let mut members = Vec::new();
            if let Some(space) = code.coset(&syndrome).map_err(err)? {
                for mask in 0..1u64 << space.basis.len() {
                    let mut y = space.offset.clone();
                    for (i, b) in space.basis.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            y ^= b;
                        }
                    }
                    members.push(y);
                }
            }
            for y in &members {
                if let Some(prev) = owner.insert(y.clone(), s) {
                    return Err(format!("seed {seed}: word {y} in cosets {prev} and {s}"));
                }
            }
            let mut expected = classes.remove(&syndrome).unwrap_or_default();
            expected.sort_by_key(|v| v.to_string());
            members.sort_by_key(|v| v.to_string());
            ensure(members == expected, || {
                format!("seed {seed}: coset {s} differs from brute force")
            })?;
        }
        ensure(classes.is_empty(), || {
            format!("seed {seed}: syndromes outside the index set")
        })?;
        ensure(owner.len() == base, || {
            format!("seed {seed}: union has {} words, null(H1) has {base}", owner.len())
        })?;
        sizes.push(base);
    }
    Ok(format!("5 codes, |null(H1)| = {sizes:?}, cosets disjoint and covering"))
}

fn scsi_code(seed: u64) -> Result<CompoundCode, String> {
    let params = EnsembleParams::new(24, 16, 12, 3, 3, 4, seed).map_err(err)?;
    let opts = AssembleOptions {
        k1: 8,
        k2: Some(4),
        require_injective: false,
    };
    CompoundCode::assemble_seeded(&params, &opts).map_err(err)
}

fn ccsi_code(seed: u64) -> Result<CompoundCode, String> {
    let params = EnsembleParams::new(24, 16, 10, 3, 5, 8, seed).map_err(err)?;
    let opts = AssembleOptions {
        k1: 6,
        k2: Some(4),
        require_injective: true,
    };
    CompoundCode::assemble_seeded(&params, &opts).map_err(err)
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

/// Identities checked from the raw trace, without the library's own audit.
fn trace_faults(code: &CompoundCode, t: &PipelineTrace) -> usize {
    if !t.feasible {
        return 0;
    }
    let (g, h1, h2) = (code.g(), code.h1(), code.h2());
    let mut faults = 0;
    faults += usize::from(apply(g, &t.info_word) != t.quantized);
    faults += usize::from(!apply(&h1, &t.info_word).is_zero());
    faults += usize::from(apply(&h2, &t.info_word) != t.syndrome);
    faults += usize::from(&t.source ^ &t.quantized != t.quantization_error);
    if let Some(y) = &t.decoded_y {
        faults += usize::from(Some(apply(g, y)) != t.decoded_x);
        faults += usize::from(!apply(&h1, y).is_zero());
    }
    match t.mode {
        SideInfoMode::Scsi => {
            // side information z = s xor noise, so z xor s_hat = e xor noise
            faults += usize::from(&t.received ^ &t.quantized != &t.quantization_error ^ &t.noise);
            faults += usize::from(&t.source ^ &t.noise != t.received);
            if let Some(y) = &t.decoded_y {
                faults += usize::from(apply(&h2, y) != t.syndrome);
            }
        }
        SideInfoMode::Ccsi => {
            faults += usize::from(t.received != &t.quantized ^ &t.noise);
            if let (Some(y), Some(m)) = (&t.decoded_y, &t.decoded_message) {
                faults += usize::from(&apply(&h2, y) != m);
            }
        }
    }
    faults
}

/// Checks that each SCSI quantization is a nearest word of `{H1 y = 0}` by
/// scanning the whole base code.
fn quantizer_suboptimal(code: &CompoundCode, traces: &[PipelineTrace]) -> usize {
    let basis = code.null_basis_h1();
    let mut words = vec![BitVector::zeros(code.n())];
    let images: Vec<BitVector> = basis.iter().map(|b| apply(code.g(), b)).collect();
    for img in &images {
        let shifted: Vec<BitVector> = words.iter().map(|x| x ^ img).collect();
        words.extend(shifted);
    }
    traces
        .iter()
        .filter(|t| {
            let best = words.iter().map(|x| x.distance(&t.source)).min().unwrap();
            t.quantized.distance(&t.source) != best
        })
        .count()
}

fn batch_digest(b: &BatchSummary) -> String {
    serde_json::to_string(b).unwrap()
}

fn scsi_end_to_end() -> Outcome {
    let plan = plan_rates_scsi(0.11, 0.03, 0.02, 1200).map_err(err)?;
    let rate = plan.k2 as f64 / 1200.0;
    let analytic = h2(0.11 * 0.97 + 0.89 * 0.03) - h2(0.11) + 0.02;
    ensure((rate - analytic).abs() < 1.0 / 600.0, || {
        format!("k2/n = {rate} vs {analytic}")
    })?;
    ensure((rate - 0.08679).abs() < 1.0 / 600.0, || {
        format!("k2/n = {rate} vs quoted 0.08679")
    })?;
    ensure((plan.target_r_trans - analytic).abs() < 1e-12, || {
        format!("planner target {}", plan.target_r_trans)
    })?;

    let code = scsi_code(11)?;
    let plan = RatePlan::for_code(SideInfoMode::Scsi, &code, 0.11, 0.03, 0.02).map_err(err)?;
    let run = |threads| {
        with_threads(threads, || {
            run_scsi_batch(&code, &plan, &Decoder::default(), 200, 12, true)
        })
    };
    let a = run(1).map_err(err)?;
    let b = run(4).map_err(err)?;
    ensure(batch_digest(&a) == batch_digest(&b), || {
        "batch differs between 1 and 4 threads".into()
    })?;
    ensure(a.invariant_violations == 0, || {
        format!("{} invariant violations", a.invariant_violations)
    })?;
    let traces = a.traces.as_ref().unwrap();
    let faults: usize = traces.iter().map(|t| trace_faults(&code, t)).sum();
    ensure(faults == 0, || format!("{faults} identities broken in traces"))?;
    let off = quantizer_suboptimal(&code, traces);
    ensure(off == 0, || format!("{off} quantizations are not nearest codewords"))?;
    Ok(format!(
        "k2/n = {rate:.6} vs {analytic:.6}; 200 trials: recovery {:.3}, distortion {:.4}, 0 violations",
        a.recovery.mean, a.distortion.mean
    ))
}

fn ccsi_end_to_end() -> Outcome {
    let plan = plan_rates_ccsi(0.25, 0.05, 0.0, 1200).map_err(err)?;
    ensure((plan.analytic_branch - 0.52488).abs() < 1e-5, || {
        format!("branch {}", plan.analytic_branch)
    })?;
    ensure((plan.analytic_branch - (h2(0.25) - h2(0.05))).abs() < 1e-12, || {
        "branch differs from direct entropy".into()
    })?;

    let code = ccsi_code(21)?;
    let noiseless = RatePlan::for_code(SideInfoMode::Ccsi, &code, 0.25, 0.0, 0.02).map_err(err)?;
    let clean = run_ccsi_batch(&code, &noiseless, &Decoder::default(), 200, 22, true).map_err(err)?;
    ensure(clean.feasible > 0, || "no feasible messages".into())?;
    let missed = clean.rows.iter().filter(|r| r.feasible && !r.recovered).count();
    ensure(missed == 0, || format!("{missed} feasible messages lost at p = 0"))?;
    let faults: usize = clean
        .traces
        .as_ref()
        .unwrap()
        .iter()
        .map(|t| trace_faults(&code, t))
        .sum();
    ensure(clean.invariant_violations == 0 && faults == 0, || {
        format!("{faults} broken identities at p = 0")
    })?;

    let noisy_plan = RatePlan::for_code(SideInfoMode::Ccsi, &code, 0.25, 0.02, 0.02).map_err(err)?;
    let run = |threads| {
        with_threads(threads, || {
            run_ccsi_batch(&code, &noisy_plan, &Decoder::default(), 200, 23, true)
        })
    };
    let noisy = run(1).map_err(err)?;
    ensure(batch_digest(&noisy) == batch_digest(&run(3).map_err(err)?), || {
        "batch differs across threads".into()
    })?;
    let faults: usize = noisy
        .traces
        .as_ref()
        .unwrap()
        .iter()
        .map(|t| trace_faults(&code, t))
        .sum();
    ensure(noisy.invariant_violations == 0 && faults == 0, || {
        format!("{faults} broken identities at p = 0.02")
    })?;
    ensure(noisy.recovery.samples == noisy.feasible, || {
        "recovery not reported over feasible trials".into()
    })?;
    Ok(format!(
        "branch {:.6}; p = 0: {}/{} feasible recovered; p = 0.02: recovery {:.3} +/- {:.3}",
        plan.analytic_branch, clean.feasible, clean.trials, noisy.recovery.mean, noisy.recovery.std_error
    ))
}

fn ccodes(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ccodes"))
        .args(args)
        .output()
        .map_err(err)?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "ccodes {} exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn read_dir_bytes(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(err)? {
        let entry = entry.map_err(err)?;
        files.insert(
            entry.file_name().to_string_lossy().into_owned(),
            fs::read(entry.path()).map_err(err)?,
        );
    }
    Ok(files)
}

fn replay_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(err)?;
    let runs: [&[&str]; 6] = [
        &["bounds", "rd", "-D", "0.11", "--grid", "400"],
        &["bounds", "enum", "--grid", "201"],
        &["sample", "--seed", "5", "--k1", "8"],
        &[
            "simulate", "scsi", "--k1", "8", "--k2", "4", "--trials", "200", "--seed", "9",
        ],
        &[
            "simulate",
            "ccsi",
            "--k",
            "10",
            "--dv",
            "5",
            "--dc-prime",
            "8",
            "--k1",
            "6",
            "--k2",
            "4",
            "--require-injective",
            "--trials",
            "100",
            "--p",
            "0.02",
        ],
        &["verify", "moments", "--trials", "2000", "--seed", "4"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let first = tmp.path().join(format!("run{i}"));
        let again = tmp.path().join(format!("replay{i}"));
        let mut a: Vec<&str> = args.to_vec();
        let first_s = first.to_string_lossy().into_owned();
        a.extend(["--threads", "1", "--out", &first_s]);
        ccodes(&a)?;
        let manifest = first.join("manifest.json").to_string_lossy().into_owned();
        let again_s = again.to_string_lossy().into_owned();
        ccodes(&["replay", &manifest, "--threads", "4", "--out", &again_s])?;
        let mut original = read_dir_bytes(&first)?;
        original.remove("manifest.json");
        let replayed = read_dir_bytes(&again)?;
        ensure(original == replayed, || {
            format!("`{}` replay produced different files", args.join(" "))
        })?;
    }
    Ok(format!(
        "{} manifests replayed byte-identically at 1 and 4 threads",
        runs.len()
    ))
}
