//! Command-line front end for `compound-codes`.
//!
//! Every command runs in memory and returns a [`Report`]: a JSON summary, a
//! human-readable text block and the named output files. [`run`] then prints
//! the summary and, with `--out`, writes the files next to a
//! [`RunManifest`] holding their SHA-256 digests. `ccodes replay` re-executes
//! a manifest and compares digests.

pub mod args;
mod commands;
mod manifest;
pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use compound_codes::analysis::format_sig;
use serde_json::Value;

pub use args::{Cli, Command, Common};
pub use manifest::{sha256_hex, RunManifest};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const INVALID: i32 = 2;
    pub const CAP: i32 = 3;
    pub const FAILED: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Invalid(String),
    Cap(String),
    /// A verification suite or a replay found a mismatch.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => exit::IO,
            CliError::Invalid(_) => exit::INVALID,
            CliError::Cap(_) => exit::CAP,
            CliError::Failed(_) => exit::FAILED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Invalid(m) => write!(f, "{m}"),
            CliError::Cap(m) => write!(f, "{m}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<compound_codes::Error> for CliError {
    fn from(e: compound_codes::Error) -> Self {
        match e {
            compound_codes::Error::EnumerationCap { .. } => CliError::Cap(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Output of one command, before anything touches the filesystem.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub summary: Value,
    pub text: String,
    /// `(file name, contents)`, in the order they are written.
    pub files: Vec<(String, Vec<u8>)>,
    /// Input files read by the command, with their digests.
    pub inputs: Vec<(String, String)>,
    /// Set by verification suites when a check fails.
    pub failed: bool,
}

impl Report {
    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_slice())
    }
}

/// Rounds every non-integer number to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            format_sig(x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

pub(crate) fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(&round_floats(v.clone())).expect("JSON values serialize");
    s.push('\n');
    s.into_bytes()
}

/// Runs `command` on the configured thread pool.
pub fn execute(common: &Common, command: &Command) -> Result<Report, CliError> {
    let work = || match command {
        Command::Replay { manifest } => manifest::replay(common, manifest),
        other => commands::dispatch(common, other),
    };
    match common.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Executes, prints and writes outputs. Verification failures are reported
/// after the outputs are written.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<Report, CliError> {
    let report = execute(&cli.common, &cli.command)?;
    if cli.common.json {
        stdout.write_all(&json_bytes(&report.summary))?;
    } else {
        stdout.write_all(report.text.as_bytes())?;
    }
    if let Some(dir) = &cli.common.out {
        write_outputs(dir, &cli.common, &cli.command, &report)?;
    }
    if report.failed {
        return Err(CliError::Failed(format!(
            "{}: one or more checks failed",
            cli.command.name()
        )));
    }
    Ok(report)
}

fn write_outputs(dir: &Path, common: &Common, command: &Command, report: &Report) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    for (name, contents) in &report.files {
        fs::write(dir.join(name), contents)?;
    }
    if !matches!(command, Command::Replay { .. }) {
        let manifest = RunManifest::new(common, command, report);
        fs::write(dir.join(manifest::MANIFEST_FILE), manifest.to_bytes())?;
    }
    Ok(())
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::INVALID } else { exit::OK };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(_) => exit::OK,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("ccodes: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_are_rounded_to_twelve_digits() {
        let v = round_floats(json!({"a": 0.1 + 0.2, "b": [1, 2.5], "c": "x", "d": 7}));
        assert_eq!(v, json!({"a": 0.3, "b": [1, 2.5], "c": "x", "d": 7}));
    }

    #[test]
    fn core_errors_map_to_exit_codes() {
        let cap: CliError = compound_codes::Error::EnumerationCap { dim: 30, cap: 26 }.into();
        assert_eq!(cap.exit_code(), exit::CAP);
        let bad: CliError = compound_codes::Error::InvalidParams("x".into()).into();
        assert_eq!(bad.exit_code(), exit::INVALID);
    }

    #[test]
    fn command_names() {
        let cli = Cli::try_parse_from(["ccodes", "simulate", "ccsi", "--p", "0"]).unwrap();
        assert_eq!(cli.command.name(), "simulate ccsi");
        let cli = Cli::try_parse_from(["ccodes", "verify", "partition", "--seed", "9"]).unwrap();
        assert_eq!(cli.command.name(), "verify partition");
        assert_eq!(cli.common.seed, 9);
    }
}
