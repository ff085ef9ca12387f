//! Coding with side information over a nested compound code.
//!
//! The syndromes of the trailing lower checks `H2` split the base code
//! `{H1 y = 0}` into cosets. Wyner-Ziv compression quantizes with the base
//! code and sends the syndrome; Gelfand-Pinsker embedding picks the coset
//! from the message and quantizes the host inside it.

mod pipeline;
mod plan;

pub use pipeline::{run_ccsi, run_ccsi_batch, run_scsi, run_scsi_batch, BatchRow, BatchSummary, PipelineTrace};
pub use plan::{
    embedding_branch, plan_rates_ccsi, plan_rates_ccsi_with_m, plan_rates_scsi, plan_rates_scsi_with_m,
    wyner_ziv_branch, RatePlan, SideInfoMode,
};
