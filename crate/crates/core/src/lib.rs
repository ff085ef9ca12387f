//! Compound LDGM/LDPC codes over GF(2).
//!
//! The crate is split along the lines of the construction itself:
//!
//! * [`gf2`]: packed bit vectors, sparse binary matrices and exact elimination.
//! * [`ensembles`]: the LDGM sampler, the regular LDPC sampler and the
//!   assembled [`CompoundCode`] with its nested lower-check partition.
//! * [`analysis`]: closed-form exponents and achievability bounds.
//! * [`codec`]: exhaustive encoders/decoders and moment experiments for codes
//!   small enough to enumerate.
//! * [`sideinfo`]: Wyner-Ziv (SCSI) and Gelfand-Pinsker (CCSI) pipelines and
//!   their rate planners.
//!
//! All exponent arithmetic runs in nats internally; every public function that
//! returns a rate or exponent reports bits unless its name says otherwise.

pub mod analysis;
pub mod codec;
pub mod ensembles;
mod error;
pub mod gf2;
pub mod rng;
pub mod sideinfo;
pub mod stats;

pub use ensembles::{CodeRates, CompoundCode, EnsembleParams};
pub use error::{Error, Result};
pub use gf2::{BitVector, SparseBitMatrix};
