use std::process::Command as Process;

use ccodes::args::{BoundsCmd, CodeArgs, Command, Common, SimulateCmd, Suite};
use ccodes::{execute, exit, RunManifest};
use serde_json::Value;

fn common() -> Common {
    Common {
        seed: 1,
        grid: 2000,
        trials: None,
        out: None,
        json: false,
        threads: None,
    }
}

fn desk_code() -> CodeArgs {
    CodeArgs {
        n: 24,
        m: 16,
        k: 12,
        d_top: 3,
        dv: 3,
        dc_prime: 4,
        k1: Some(8),
        k2: None,
        require_injective: false,
        code: None,
    }
}

fn bin(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_ccodes")).args(args).output().unwrap()
}

fn curve(bytes: &[u8]) -> Vec<(f64, f64)> {
    std::str::from_utf8(bytes)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(',');
            (f.next().unwrap().parse().unwrap(), f.next().unwrap().parse().unwrap())
        })
        .collect()
}

fn max_of(summary: &Value, label: &str) -> f64 {
    summary["curves"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["lower_code"] == label)
        .unwrap()["max"]
        .as_f64()
        .unwrap()
}

#[test]
fn rd_bounds_maxima() {
    let cmd = Command::Bounds(BoundsCmd::Rd {
        distortion: 0.11,
        d_top: 4,
        dv: 3,
        dc_prime: 6,
        band: 1e-4,
    });
    let fine = execute(&common(), &cmd).unwrap();
    assert!(max_of(&fine.summary, "uncoded") > 0.5);
    assert!((max_of(&fine.summary, "compound") - 0.5).abs() < 1e-4);
    let coarse = execute(&Common { grid: 10, ..common() }, &cmd).unwrap();
    for label in ["uncoded", "compound"] {
        assert!((max_of(&fine.summary, label) - max_of(&coarse.summary, label)).abs() < 1e-6);
    }
    assert_eq!(curve(fine.file("rd_compound.csv").unwrap()).len(), 2000);
}

#[test]
fn overlap_curves_order_by_degree() {
    let cmd = Command::Bounds(BoundsCmd::Overlap {
        distortion: 0.11,
        d_top: vec![3, 4, 5],
    });
    let r = execute(&Common { grid: 401, ..common() }, &cmd).unwrap();
    let c: Vec<Vec<(f64, f64)>> = [3, 4, 5]
        .iter()
        .map(|d| curve(r.file(&format!("overlap_d{d}.csv")).unwrap()))
        .collect();
    let floor = -0.500084041835;
    for curve in &c {
        assert_eq!(curve[0], (0.0, 0.0));
        assert!((curve.last().unwrap().1 - floor).abs() < 1e-9);
    }
    for i in 1..c[0].len() {
        assert!(
            c[2][i].1 <= c[1][i].1 + 1e-12 && c[1][i].1 <= c[0][i].1 + 1e-12,
            "w = {}",
            c[0][i].0
        );
    }
}

#[test]
fn enumerator_curves_peak_at_half() {
    let cmd = Command::Bounds(BoundsCmd::Enum {
        dv: vec![],
        dc_prime: vec![],
    });
    let r = execute(&Common { grid: 300, ..common() }, &cmd).unwrap();
    for (v, c) in [(3, 6), (4, 8), (5, 10)] {
        let pts = curve(r.file(&format!("enum_dv{v}_dc{c}.csv")).unwrap());
        let (w, peak) = pts
            .iter()
            .cloned()
            .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        assert_eq!(w, 0.5);
        assert!((peak - 0.5).abs() < 1e-10);
        assert!(pts[1].1 < 0.0);
        let k = pts.len() - 1;
        for i in 0..=k {
            assert!((pts[i].1 - pts[k - i].1).abs() < 1e-9);
        }
    }
}

#[test]
fn zero_trials_give_an_empty_summary() {
    let cmd = Command::Simulate(SimulateCmd::Rd(desk_code()));
    let r = execute(
        &Common {
            trials: Some(0),
            ..common()
        },
        &cmd,
    )
    .unwrap();
    assert_eq!(r.summary["result"]["trials"], 0);
    assert_eq!(r.file("trials.csv").unwrap(), b"trial,distortion\n");
    let out = bin(&["simulate", "scsi", "--trials", "0", "--k1", "8", "--k2", "4"]);
    assert_eq!(out.status.code(), Some(exit::OK));
}

#[test]
fn rd_simulation_reports_mean_distortion() {
    let cmd = Command::Simulate(SimulateCmd::Rd(desk_code()));
    let r = execute(
        &Common {
            trials: Some(50),
            ..common()
        },
        &cmd,
    )
    .unwrap();
    let d = r.summary["result"]["distortion"]["mean"].as_f64().unwrap();
    assert!(d > 0.0 && d < 0.5);
    assert!(r.text.contains("mean distortion"));
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["bounds", "rd", "-D", "0.7"]).status.code(), Some(exit::INVALID));
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(exit::INVALID));
    let cap = bin(&[
        "simulate",
        "rd",
        "--n",
        "200",
        "--m",
        "150",
        "--k",
        "100",
        "--dv",
        "2",
        "--dc-prime",
        "3",
    ]);
    assert_eq!(cap.status.code(), Some(exit::CAP));
    let missing = bin(&["replay", "/nonexistent/manifest.json"]);
    assert_eq!(missing.status.code(), Some(exit::IO));
    assert_eq!(bin(&["verify", "partition"]).status.code(), Some(exit::OK));
}

#[test]
fn verify_suites_pass() {
    for suite in [Suite::Exponents, Suite::Derivatives, Suite::Overlap, Suite::Partition] {
        let r = execute(&Common { grid: 400, ..common() }, &Command::Verify { suite }).unwrap();
        assert!(!r.failed, "{suite:?}:\n{}", r.text);
    }
    let r = execute(
        &Common {
            trials: Some(1000),
            ..common()
        },
        &Command::Verify { suite: Suite::Moments },
    )
    .unwrap();
    assert!(!r.failed, "{}", r.text);
}

#[test]
fn replay_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let out_s = out.to_str().unwrap();
    let first = bin(&["simulate", "channel", "--p", "0.05", "--trials", "40", "--out", out_s]);
    assert_eq!(first.status.code(), Some(exit::OK));
    let manifest_path = out.join("manifest.json");
    let manifest: RunManifest = serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest.subcommand, "simulate channel");
    assert!(manifest.outputs.contains_key("trials.csv"));

    let ok = bin(&["replay", manifest_path.to_str().unwrap(), "--threads", "3"]);
    assert_eq!(
        ok.status.code(),
        Some(exit::OK),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );

    let mut tampered = manifest.clone();
    tampered.seed += 1;
    std::fs::write(&manifest_path, tampered.to_bytes()).unwrap();
    let bad = bin(&["replay", manifest_path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(exit::FAILED));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("MISMATCH"));
}

#[test]
fn sampled_code_round_trips_through_the_container() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    assert_eq!(
        bin(&["sample", "--seed", "3", "--k1", "8", "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let code_path = out.join("code.json");
    let mut from_file = desk_code();
    from_file.code = Some(code_path.clone());
    let sampled = execute(&Common { seed: 3, ..common() }, &Command::Sample(desk_code())).unwrap();
    let loaded = execute(&common(), &Command::Sample(from_file)).unwrap();
    assert_eq!(sampled.file("code.json"), loaded.file("code.json"));
    assert_eq!(loaded.inputs.len(), 1);
}
