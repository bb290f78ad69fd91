//! Distributed sparse matrix-vector multiplication over a block-cyclic row
//! layout, with two interchangeable ghost-exchange strategies:
//!
//! * **v1** — block-wise pull: each rank fetches every remote block that
//!   contains at least one needed x component, whole.
//! * **v2** — condensed push: each owner packs exactly the unique components
//!   its peers need and writes them into their Shared Receive Buffers; one
//!   message per communicating pair.
//!
//! Both strategies produce bitwise-identical results; they differ only in
//! communication volume, which is predicted exactly by the analytic model in
//! [`plan`] and cross-checked against measured transfer counters.

pub mod layout;
pub mod plan;
pub mod run;
pub mod worker;

pub use layout::{pad_vector, BlockCyclicLayout};
pub use plan::{
    plan_v1, plan_v2, predict_v1, predict_v2, slice_requirements, slice_rows, MatrixSlice, PlanV1,
    PlanV2, PredictedVolume,
};
pub use run::{run_spmv, SpmvOptions, SpmvReport};
pub use worker::SpmvWorker;

use crate::error::Error;

/// Ghost-exchange strategy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Block-wise pull of whole blocks.
    V1,
    /// Condensed push of unique elements into Shared Receive Buffers.
    V2,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::V1 => "v1",
            Strategy::V2 => "v2",
        })
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "v1" => Ok(Strategy::V1),
            "v2" => Ok(Strategy::V2),
            other => Err(Error::InvalidArgument(format!(
                "unknown strategy {other:?} (expected \"v1\" or \"v2\")"
            ))),
        }
    }
}
