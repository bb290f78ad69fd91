//! Square sparse matrices: COO input form, modified ELLPACK storage,
//! a serial multiply with a pinned accumulation order, an independent dense
//! oracle, a deterministic banded generator, and a Matrix Market reader.

mod coo;
mod ellpack;
mod generate;
mod market;

pub use coo::{CooMatrix, Entry};
pub use ellpack::{spmv_dense_oracle, spmv_serial, EllpackMatrix};
pub use generate::generate_synthetic;
pub use market::read_matrix_market;
