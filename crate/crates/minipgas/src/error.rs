//! Crate-wide error type and `Result` alias.

use std::time::Duration;

use thiserror::Error;

use crate::pgas::{RankId, SegId};

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the runtime, the kernels and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rank {rank} failed: {source}")]
    RankFailed {
        rank: RankId,
        #[source]
        source: Box<Error>,
    },

    #[error("rank {rank} panicked: {message}")]
    RankPanicked { rank: RankId, message: String },

    #[error(
        "barrier timed out on rank {rank} after {timeout:?} ({arrived} of {expected} ranks arrived)"
    )]
    BarrierTimeout {
        rank: RankId,
        timeout: Duration,
        arrived: usize,
        expected: usize,
    },

    #[error("collective timed out on rank {rank} after {timeout:?}")]
    CollectiveTimeout { rank: RankId, timeout: Duration },

    #[error("collective mismatch: {0}")]
    CollectiveMismatch(String),

    #[error("rank {caller} does not own the segment (owner is rank {owner})")]
    NotOwner { caller: RankId, owner: RankId },

    #[error("unknown segment {segment} on rank {owner} (reference from another world?)")]
    UnknownSegment { owner: RankId, segment: SegId },

    #[error("span mismatch: reference spans {expected} elements, buffer holds {actual}")]
    SpanMismatch { expected: usize, actual: usize },

    #[error(
        "segment budget exceeded on rank {rank}: requested {requested} bytes with {used} of {budget} already in use"
    )]
    SegmentBudget {
        rank: RankId,
        requested: u64,
        used: u64,
        budget: u64,
    },

    #[error(
        "conflicting transfer writes within one phase on rank {owner}, segment {segment}: ranges {first:?} and {second:?} overlap"
    )]
    WriteOverlap {
        owner: RankId,
        segment: SegId,
        first: (usize, usize),
        second: (usize, usize),
    },

    #[error("matrix structure error: {0}")]
    MatrixStructure(String),

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(
        "stale ghost values: computed with exchange epoch {found}, but the current epoch is {expected}"
    )]
    StaleGhosts { found: u64, expected: u64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
