//! Explicit 2-D heat-equation solver on a distributed grid.
//!
//! The global `m x n` interior is split across a rectangular [`ProcessGrid`]
//! of ranks; each rank sweeps a five-point stencil over its tile and trades
//! one-cell-deep halos with its neighbors every step. Results are bitwise
//! independent of the decomposition: every tile performs the same
//! floating-point operations in the same order as the corresponding region
//! of a single-rank run.

pub mod grid;
pub mod solver;
pub mod stencil;

pub use grid::{Neighbors, ProcessGrid};
pub use solver::{predict_halo_volume, run_heat, HeatOptions, HeatReport, InitSpec};
pub use stencil::step_interior;
