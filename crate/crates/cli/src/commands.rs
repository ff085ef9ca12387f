use std::fs;

use compound_codes::analysis::{
    binary_entropy, channel_condition_holds, channel_curve, enum_curve, format_sig, overlap_curve, rd_min_rate,
    rd_ratio_curve, smallest_passing_degree, ExponentCurve, LowerCode,
};
use compound_codes::codec::{run_channel_batch, run_rd_batch, Decoder};
use compound_codes::ensembles::AssembleOptions;
use compound_codes::sideinfo::{run_ccsi_batch, run_scsi_batch, BatchSummary, RatePlan, SideInfoMode};
use compound_codes::{CompoundCode, EnsembleParams};
use serde_json::{json, Value};

use crate::args::{BoundsCmd, CodeArgs, Command, Common, DecoderArgs, DecoderKind, SimulateCmd};
use crate::manifest::sha256_hex;
use crate::{json_bytes, verify, CliError, Report};

const DEFAULT_SIM_TRIALS: usize = 1000;

pub(crate) fn dispatch(common: &Common, command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Bounds(b) => bounds(common, b),
        Command::Sample(code) => sample(common, code),
        Command::Simulate(s) => simulate(common, s),
        Command::Verify { suite } => verify::run_suite(common, *suite),
        Command::Replay { .. } => unreachable!("replay is handled by the caller"),
    }
}

fn curve_file(name: String, curve: &ExponentCurve) -> (String, Vec<u8>) {
    (name, curve.to_csv().into_bytes())
}

fn with_summary(mut report: Report) -> Report {
    report.files.push(("summary.json".into(), json_bytes(&report.summary)));
    report
}

fn bounds(common: &Common, cmd: &BoundsCmd) -> Result<Report, CliError> {
    let grid = common.grid;
    let mut files = Vec::new();
    let mut text = String::new();
    let summary = match *cmd {
        BoundsCmd::Rd {
            distortion: d,
            d_top,
            dv,
            dc_prime,
            band,
        } => {
            let lower = LowerCode::ldpc(dv, dc_prime)?;
            let shannon = 1.0 - binary_entropy(d)?;
            let mut rows = Vec::new();
            for (label, code) in [("compound", lower), ("uncoded", LowerCode::Uncoded)] {
                let curve = rd_ratio_curve(d, d_top, code, grid, band)?;
                let best = rd_min_rate(d, d_top, code, grid, band)?;
                files.push(curve_file(format!("rd_{label}.csv"), &curve));
                text.push_str(&format!(
                    "{label:>9}: max rate ratio {} at w = {}\n",
                    format_sig(best.value),
                    format_sig(best.w)
                ));
                rows.push(
                    json!({"lower_code": label, "max": best.value, "argmax": best.w, "curve": curve.metadata_json()}),
                );
            }
            text.push_str(&format!("  Shannon: 1 - h(D) = {}\n", format_sig(shannon)));
            json!({"D": d, "d_top": d_top, "shannon_rate": shannon, "curves": rows})
        }
        BoundsCmd::Overlap {
            distortion: d,
            ref d_top,
        } => {
            let mut rows = Vec::new();
            for &dt in d_top {
                let curve = overlap_curve(d, dt, grid)?;
                let first = curve.values.first().copied().unwrap_or(f64::NAN);
                let last = curve.values.last().copied().unwrap_or(f64::NAN);
                text.push_str(&format!(
                    "d_top = {dt}: F at w = 0 is {}, at w = 1/2 is {}\n",
                    format_sig(first),
                    format_sig(last)
                ));
                files.push(curve_file(format!("overlap_d{dt}.csv"), &curve));
                rows.push(json!({"d_top": dt, "at_zero": first, "at_half": last}));
            }
            let floor = -(1.0 - binary_entropy(d)?);
            text.push_str(&format!("-(1 - h(D)) = {}\n", format_sig(floor)));
            json!({"D": d, "floor": floor, "curves": rows})
        }
        BoundsCmd::Enum { ref dv, ref dc_prime } => {
            let pairs: Vec<(usize, usize)> = if dv.is_empty() && dc_prime.is_empty() {
                vec![(3, 6), (4, 8), (5, 10)]
            } else if dv.len() == dc_prime.len() {
                dv.iter().copied().zip(dc_prime.iter().copied()).collect()
            } else {
                return Err(CliError::Invalid(
                    "--dv and --dc-prime need the same number of values".into(),
                ));
            };
            let mut rows = Vec::new();
            for (v, c) in pairs {
                let curve = enum_curve(v, c, grid)?;
                let (w, peak) = curve.max().unwrap_or((f64::NAN, f64::NAN));
                text.push_str(&format!(
                    "({v},{c}): peak {} at w = {}\n",
                    format_sig(peak),
                    format_sig(w)
                ));
                files.push(curve_file(format!("enum_dv{v}_dc{c}.csv"), &curve));
                rows.push(json!({"dv": v, "dc_prime": c, "peak": peak, "argmax": w}));
            }
            json!({"curves": rows})
        }
        BoundsCmd::Channel {
            p,
            d_top,
            dv,
            dc_prime,
            r_g,
            max_d_top,
        } => {
            let lower = LowerCode::ldpc(dv, dc_prime)?;
            let curve = channel_curve(p, d_top, lower, r_g, grid)?;
            files.push(curve_file(format!("channel_d{d_top}.csv"), &curve));
            let here = channel_condition_holds(p, d_top, lower, r_g, grid)?;
            let sweep = smallest_passing_degree(p, lower, r_g, 1..=max_d_top, grid)?;
            let rate = r_g * lower.r_h();
            text.push_str(&format!(
                "rate {} vs capacity {}\nd_top = {d_top}: condition {} (worst L = {} at w = {})\n",
                format_sig(rate),
                format_sig(1.0 - binary_entropy(p)?),
                if here.holds { "holds" } else { "fails" },
                format_sig(here.worst_value),
                format_sig(here.worst_w)
            ));
            match sweep {
                Some((d, _)) => text.push_str(&format!("smallest passing d_top <= {max_d_top}: {d}\n")),
                None => text.push_str(&format!("no d_top <= {max_d_top} passes\n")),
            }
            json!({
                "p": p,
                "rate": rate,
                "capacity": 1.0 - binary_entropy(p)?,
                "d_top": d_top,
                "condition": here,
                "smallest_passing_d_top": sweep.map(|(d, _)| d),
            })
        }
    };
    Ok(with_summary(Report {
        summary,
        text,
        files,
        ..Default::default()
    }))
}

/// Loads or samples the code described by `args`. Returns the input digest
/// when the code came from a file.
fn build_code(args: &CodeArgs, seed: u64) -> Result<(CompoundCode, Option<(String, String)>), CliError> {
    if let Some(path) = &args.code {
        let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::Invalid(format!("{} is not UTF-8", path.display())))?;
        let code = CompoundCode::from_json(&text)?;
        return Ok((code, Some((path.display().to_string(), sha256_hex(&bytes)))));
    }
    let params = if args.k == 0 {
        EnsembleParams::ldgm(args.n, args.m, args.d_top, seed)?
    } else {
        EnsembleParams::new(args.n, args.m, args.k, args.d_top, args.dv, args.dc_prime, seed)?
    };
    let options = AssembleOptions {
        k1: args.k1.unwrap_or(args.k),
        k2: args.k2,
        require_injective: args.require_injective,
    };
    Ok((CompoundCode::assemble_seeded(&params, &options)?, None))
}

fn code_summary(code: &CompoundCode) -> Value {
    json!({
        "params": code.params(),
        "n": code.n(),
        "m": code.m(),
        "k1": code.k1(),
        "k2": code.k2(),
        "rates": code.rates(),
        "rank_h": code.h().rank(),
        "rank_h1": code.h1().rank(),
        "base_dim": code.null_basis_h1().len(),
        "full_dim": code.null_basis_h().len(),
        "injective_on_base": code.is_injective_on_h1(),
    })
}

fn sample(common: &Common, args: &CodeArgs) -> Result<Report, CliError> {
    let (code, input) = build_code(args, common.seed)?;
    let summary = code_summary(&code);
    let r = code.rates();
    let text = format!(
        "n = {}, m = {}, k1 = {}, k2 = {}\nrates: R_G = {}, R_H = {}, nominal {}, effective {}\nbase dim {}, full dim {}, injective on base: {}\n",
        code.n(),
        code.m(),
        code.k1(),
        code.k2(),
        format_sig(r.r_g),
        format_sig(r.r_h),
        format_sig(r.nominal),
        format_sig(r.effective),
        code.null_basis_h1().len(),
        code.null_basis_h().len(),
        code.is_injective_on_h1()
    );
    let mut container = code.to_json();
    container.push('\n');
    Ok(with_summary(Report {
        summary,
        text,
        files: vec![
            ("code.json".into(), container.into_bytes()),
            ("g.txt".into(), code.g().to_text().into_bytes()),
            ("h.txt".into(), code.h().to_text().into_bytes()),
        ],
        inputs: input.into_iter().collect(),
        failed: false,
    }))
}

fn decoder_of(args: &DecoderArgs) -> Decoder {
    match args.decoder {
        DecoderKind::Ml => Decoder::MaximumLikelihood,
        DecoderKind::Threshold => Decoder::Threshold {
            epsilon_n: args.epsilon_n,
        },
        DecoderKind::ThresholdMl => Decoder::ThresholdThenMl {
            epsilon_n: args.epsilon_n,
        },
    }
}

/// Drops per-trial arrays from a serialized summary; they go to the CSV.
fn without(mut v: Value, keys: &[&str]) -> Value {
    if let Value::Object(o) = &mut v {
        for k in keys {
            o.remove(*k);
        }
    }
    v
}

fn estimate_line(label: &str, e: &compound_codes::stats::MeanEstimate) -> String {
    format!(
        "{label}: {} +/- {} ({} samples)\n",
        format_sig(e.mean),
        format_sig(e.std_error),
        e.samples
    )
}

fn simulate(common: &Common, cmd: &SimulateCmd) -> Result<Report, CliError> {
    let trials = common.trials.unwrap_or(DEFAULT_SIM_TRIALS);
    let seed = common.seed;
    let code_args = match cmd {
        SimulateCmd::Rd(c) => c,
        SimulateCmd::Channel { code, .. } | SimulateCmd::Scsi { code, .. } | SimulateCmd::Ccsi { code, .. } => code,
    };
    let (code, input) = build_code(code_args, seed)?;
    let mut files = Vec::new();
    let mut text = format!("{trials} trials, seed {seed}\n");
    let summary = match cmd {
        SimulateCmd::Rd(_) => {
            let s = run_rd_batch(&code, trials, seed)?;
            text.push_str(&estimate_line("mean distortion", &s.distortion));
            let mut csv = String::from("trial,distortion\n");
            for t in &s.results {
                csv.push_str(&format!("{},{}\n", t.trial, format_sig(t.distortion)));
            }
            files.push(("trials.csv".to_string(), csv.into_bytes()));
            without(serde_json::to_value(&s).expect("summary serializes"), &["results"])
        }
        SimulateCmd::Channel { p, epsilon_n, .. } => {
            let s = run_channel_batch(&code, *p, *epsilon_n, trials, seed)?;
            text.push_str(&estimate_line("threshold error", &s.threshold_error));
            text.push_str(&estimate_line("threshold erasure", &s.threshold_erasure));
            text.push_str(&estimate_line("ML error", &s.ml_error));
            let mut csv = String::from("trial,noise_weight,threshold,ml\n");
            for t in &s.results {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    t.trial,
                    t.noise_weight,
                    status_name(t.threshold),
                    status_name(t.ml)
                ));
            }
            files.push(("trials.csv".to_string(), csv.into_bytes()));
            without(serde_json::to_value(&s).expect("summary serializes"), &["results"])
        }
        SimulateCmd::Scsi {
            distortion,
            p,
            epsilon,
            decoder,
            ..
        } => {
            let plan = RatePlan::for_code(SideInfoMode::Scsi, &code, *distortion, *p, *epsilon)?;
            let s = run_scsi_batch(&code, &plan, &decoder_of(decoder), trials, seed, decoder.dump_traces)?;
            side_info_output(&plan, &s, &mut text, &mut files)
        }
        SimulateCmd::Ccsi {
            budget,
            p,
            epsilon,
            decoder,
            ..
        } => {
            let plan = RatePlan::for_code(SideInfoMode::Ccsi, &code, *budget, *p, *epsilon)?;
            let s = run_ccsi_batch(&code, &plan, &decoder_of(decoder), trials, seed, decoder.dump_traces)?;
            side_info_output(&plan, &s, &mut text, &mut files)
        }
    };
    let summary = json!({"code": code_summary(&code), "seed": seed, "result": summary});
    Ok(with_summary(Report {
        summary,
        text,
        files,
        inputs: input.into_iter().collect(),
        failed: false,
    }))
}

fn status_name(s: compound_codes::codec::DecodeStatus) -> &'static str {
    use compound_codes::codec::DecodeStatus::*;
    match s {
        Decoded => "decoded",
        Erasure => "erasure",
        Error => "error",
    }
}

fn side_info_output(plan: &RatePlan, s: &BatchSummary, text: &mut String, files: &mut Vec<(String, Vec<u8>)>) -> Value {
    text.push_str(&format!(
        "transmission rate {} (analytic target {})\nfeasible trials: {}\n",
        format_sig(plan.r_trans),
        format_sig(plan.target_r_trans),
        s.feasible
    ));
    text.push_str(&estimate_line("recovery", &s.recovery));
    let label = match s.mode {
        SideInfoMode::Scsi => "end distortion",
        SideInfoMode::Ccsi => "channel input weight",
    };
    text.push_str(&estimate_line(label, &s.distortion));
    text.push_str(&format!(
        "invariant violations: {}, ML fallbacks: {}\n",
        s.invariant_violations, s.ml_fallbacks
    ));
    files.push(("trials.csv".to_string(), s.to_csv().into_bytes()));
    if let Some(traces) = &s.traces {
        let v = serde_json::to_value(traces).expect("traces serialize");
        files.push(("traces.json".to_string(), json_bytes(&v)));
    }
    json!({
        "plan": plan,
        "batch": without(serde_json::to_value(s).expect("summary serializes"), &["rows", "traces"]),
    })
}
