use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use compound_codes::analysis::{DEFAULT_ENDPOINT_BAND, DEFAULT_GRID};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug, Clone)]
#[command(
    name = "ccodes",
    version,
    about = "Compound LDGM/LDPC codes: bounds, simulations and checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Common {
    /// Master seed for code sampling and Monte Carlo trials.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Grid points for curves and maximizations.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Monte Carlo trials (each command has its own default).
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Directory for output files and the run manifest.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Print the summary as JSON instead of text.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub json: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Exponent and bound curves as CSV.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Draw a compound code and write it out.
    Sample(CodeArgs),
    /// Monte Carlo runs of the desk-scale codecs.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Run a verification suite; exits 4 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Re-run a manifest and compare output digests.
    Replay { manifest: PathBuf },
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsCmd {
    /// Rate ratio for the compound code and for an uncoded lower code.
    Rd {
        #[arg(long = "distortion", short = 'D')]
        distortion: f64,
        #[arg(long, default_value_t = 4)]
        d_top: usize,
        #[arg(long, default_value_t = 3)]
        dv: usize,
        #[arg(long, default_value_t = 6)]
        dc_prime: usize,
        /// Width of the excluded band below w = 1/2.
        #[arg(long, default_value_t = DEFAULT_ENDPOINT_BAND)]
        band: f64,
    },
    /// Overlap exponent F(delta(w); D) for several top degrees.
    Overlap {
        #[arg(long = "distortion", short = 'D')]
        distortion: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [3usize, 4, 5])]
        d_top: Vec<usize>,
    },
    /// LDPC weight-enumerator bound B(w); pairs default to (3,6),(4,8),(5,10).
    Enum {
        #[arg(long, value_delimiter = ',')]
        dv: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        dc_prime: Vec<usize>,
    },
    /// Channel exponent L(w) and the smallest top degree meeting the condition.
    Channel {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 4)]
        d_top: usize,
        #[arg(long, default_value_t = 3)]
        dv: usize,
        #[arg(long, default_value_t = 6)]
        dc_prime: usize,
        #[arg(long, default_value_t = 1.0)]
        r_g: f64,
        /// Largest top degree tried by the sweep.
        #[arg(long, default_value_t = 32)]
        max_d_top: usize,
    },
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeArgs {
    #[arg(long, default_value_t = 24)]
    pub n: usize,
    #[arg(long, default_value_t = 16)]
    pub m: usize,
    /// Rows of H; 0 gives a plain LDGM code.
    #[arg(long, default_value_t = 12)]
    pub k: usize,
    #[arg(long, default_value_t = 3)]
    pub d_top: usize,
    #[arg(long, default_value_t = 3)]
    pub dv: usize,
    #[arg(long, default_value_t = 4)]
    pub dc_prime: usize,
    /// Rows of H in the base block H1 (default: all of them).
    #[arg(long)]
    pub k1: Option<usize>,
    /// Rows of the lower block H2 (default: k - k1).
    #[arg(long)]
    pub k2: Option<usize>,
    /// Redraw G until it is one-to-one on the base information space.
    #[arg(long)]
    pub require_injective: bool,
    /// Load the code from a JSON container instead of sampling it.
    #[arg(long)]
    pub code: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulateCmd {
    /// Quantize uniform sources with the full code.
    Rd(CodeArgs),
    /// Random codewords over a BSC, threshold and ML decoding.
    Channel {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        p: f64,
        /// Slack added to p*n in the threshold radius.
        #[arg(long)]
        epsilon_n: Option<f64>,
    },
    /// Lossy compression with decoder side information.
    Scsi {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long = "distortion", short = 'D', default_value_t = 0.11)]
        distortion: f64,
        #[arg(long, default_value_t = 0.03)]
        p: f64,
        #[arg(long, default_value_t = 0.02)]
        epsilon: f64,
        #[command(flatten)]
        decoder: DecoderArgs,
    },
    /// Channel coding with encoder-known interference.
    Ccsi {
        #[command(flatten)]
        code: CodeArgs,
        /// Channel-input weight budget.
        #[arg(long, default_value_t = 0.25)]
        budget: f64,
        #[arg(long, default_value_t = 0.05)]
        p: f64,
        #[arg(long, default_value_t = 0.02)]
        epsilon: f64,
        #[command(flatten)]
        decoder: DecoderArgs,
    },
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderArgs {
    #[arg(long, value_enum, default_value_t = DecoderKind::ThresholdMl)]
    pub decoder: DecoderKind,
    /// Slack added to p*n in the threshold radius.
    #[arg(long)]
    pub epsilon_n: Option<f64>,
    /// Also write every pipeline trace.
    #[arg(long)]
    pub dump_traces: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    Ml,
    Threshold,
    ThresholdMl,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Exponents,
    Derivatives,
    Moments,
    Overlap,
    Partition,
}

impl Command {
    /// Space-separated subcommand path, e.g. `simulate scsi`.
    pub fn name(&self) -> String {
        match self {
            Command::Bounds(b) => format!(
                "bounds {}",
                match b {
                    BoundsCmd::Rd { .. } => "rd",
                    BoundsCmd::Overlap { .. } => "overlap",
                    BoundsCmd::Enum { .. } => "enum",
                    BoundsCmd::Channel { .. } => "channel",
                }
            ),
            Command::Sample(_) => "sample".into(),
            Command::Simulate(s) => format!(
                "simulate {}",
                match s {
                    SimulateCmd::Rd(_) => "rd",
                    SimulateCmd::Channel { .. } => "channel",
                    SimulateCmd::Scsi { .. } => "scsi",
                    SimulateCmd::Ccsi { .. } => "ccsi",
                }
            ),
            Command::Verify { suite } => {
                format!("verify {}", suite.to_possible_value().unwrap().get_name())
            }
            Command::Replay { .. } => "replay".into(),
        }
    }
}
