//! minipgas: an in-process PGAS runtime with two distributed kernels.
//!
//! The crate provides:
//! - [`pgas`]: SPMD ranks on threads, partitioned shared segments, one-sided
//!   transfers with completion futures, collectives, and exact communication
//!   accounting;
//! - [`sparse`]: square sparse matrices in a modified ELLPACK format with a
//!   serial multiply, a dense cross-checking oracle, a deterministic banded
//!   generator and a Matrix Market reader;
//! - [`spmv`]: distributed SpMV over a block-cyclic layout with block-wise
//!   (v1) and condensed (v2) ghost exchanges plus exact volume models;
//! - [`heat`]: an explicit 2-D heat-equation solver with halo exchange over
//!   a rectangular rank grid, bitwise independent of the decomposition.

pub mod cli;
pub mod error;
pub mod heat;
pub mod pgas;
pub mod sparse;
pub mod spmv;

pub use error::{Error, Result};
