//! Exhaustive encoders and decoders for codes small enough to enumerate,
//! plus Monte Carlo moment experiments.
//!
//! Every search walks the admissible information words in Gray-code order
//! and breaks ties in favour of the first word visited, so results are
//! deterministic.

mod decode;
mod enumerate;
mod experiments;
mod moments;
mod weights;

pub use decode::{
    channel_decode_ml, channel_decode_threshold, count_good_codewords, decode_ml_in, decode_threshold_in,
    distortion_radius, nearest_codeword, source_encode_exhaustive, threshold_radius, DecodeResult, DecodeRule,
    DecodeStatus, Decoder, SourceEncodeResult,
};
pub use enumerate::{enumerate_codewords, information_space, Codebook, CodewordIter, Constraint, ENUMERATION_CAP_LOG2};
pub use experiments::{
    random_codeword, run_channel_batch, run_rd_batch, ChannelSummary, ChannelTrial, RdSummary, RdTrial,
};
pub use moments::{ball_probability, moment_experiment, sample_ball, MomentEstimate};
pub use weights::{ldpc_weight_enumerator, weight_enumerator_exact, WeightHistogram};
