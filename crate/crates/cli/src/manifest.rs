use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::args::{Command, Common};
use crate::{CliError, Report};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything needed to re-run a command. Thread count, output directory and
/// print format are left out on purpose: none of them changes the outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: u64,
    pub grid: usize,
    pub trials: Option<usize>,
    pub command: Command,
    /// Input file path → SHA-256.
    pub inputs: BTreeMap<String, String>,
    /// Output file name → SHA-256.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(common: &Common, command: &Command, report: &Report) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: command.name(),
            seed: common.seed,
            grid: common.grid,
            trials: common.trials,
            command: command.clone(),
            inputs: report.inputs.iter().cloned().collect(),
            outputs: report
                .files
                .iter()
                .map(|(name, bytes)| (name.clone(), sha256_hex(bytes)))
                .collect(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s.into_bytes()
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }

    /// Options to re-run with; execution-only settings come from `current`.
    pub fn common(&self, current: &Common) -> Common {
        Common {
            seed: self.seed,
            grid: self.grid,
            trials: self.trials,
            out: current.out.clone(),
            json: current.json,
            threads: current.threads,
        }
    }
}

pub(crate) fn replay(current: &Common, path: &Path) -> Result<Report, CliError> {
    let manifest = RunManifest::load(path)?;
    if matches!(manifest.command, Command::Replay { .. }) {
        return Err(CliError::Invalid("a manifest cannot describe a replay".into()));
    }
    let common = manifest.common(current);
    let inner = crate::execute(&common, &manifest.command)?;

    let mut text = format!("replaying {} (seed {})\n", manifest.subcommand, manifest.seed);
    let mut rows = Vec::new();
    let mut mismatches = 0;
    let produced: BTreeMap<&str, String> = inner.files.iter().map(|(n, b)| (n.as_str(), sha256_hex(b))).collect();
    for (input, digest) in &manifest.inputs {
        let found = inner.inputs.iter().find(|(p, _)| p == input).map(|(_, d)| d.clone());
        let ok = found.as_deref() == Some(digest.as_str());
        mismatches += usize::from(!ok);
        text.push_str(&format!("  input  {input}: {}\n", if ok { "same" } else { "CHANGED" }));
    }
    for (name, digest) in &manifest.outputs {
        let got = produced.get(name.as_str()).cloned();
        let ok = got.as_deref() == Some(digest.as_str());
        mismatches += usize::from(!ok);
        text.push_str(&format!(
            "  output {name}: {}\n",
            if ok { "identical" } else { "MISMATCH" }
        ));
        rows.push(json!({"file": name, "expected": digest, "found": got, "identical": ok}));
    }
    for name in produced.keys().filter(|n| !manifest.outputs.contains_key(**n)) {
        mismatches += 1;
        text.push_str(&format!("  output {name}: not in manifest\n"));
    }
    if manifest.version != env!("CARGO_PKG_VERSION") {
        text.push_str(&format!(
            "  note: manifest written by version {}, replayed with {}\n",
            manifest.version,
            env!("CARGO_PKG_VERSION")
        ));
    }
    text.push_str(if mismatches == 0 {
        "all digests match\n"
    } else {
        "digests differ\n"
    });
    Ok(Report {
        summary: json!({
            "subcommand": manifest.subcommand,
            "seed": manifest.seed,
            "files": rows,
            "mismatches": mismatches,
        }),
        text,
        files: inner.files,
        inputs: inner.inputs,
        failed: mismatches > 0 || inner.failed,
    })
}
