//! Coordinate-format square sparse matrices.

use crate::error::{Error, Result};

/// One stored matrix entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// A square sparse matrix as a list of (row, col, value) entries.
///
/// Invariants enforced at construction: indices in range, no duplicate
/// (row, col) positions, and no explicitly stored zero values — the stored
/// entries are exactly the nonzeros of the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CooMatrix {
    n: usize,
    entries: Vec<Entry>,
}

impl CooMatrix {
    pub fn new(n: usize, entries: Vec<Entry>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "matrix dimension must be at least 1".into(),
            ));
        }
        for e in &entries {
            if e.row >= n || e.col >= n {
                return Err(Error::MatrixStructure(format!(
                    "entry ({}, {}) out of bounds for dimension {n}",
                    e.row, e.col
                )));
            }
            if e.value == 0.0 {
                return Err(Error::MatrixStructure(format!(
                    "explicit zero value stored at ({}, {})",
                    e.row, e.col
                )));
            }
        }
        let mut positions: Vec<(usize, usize)> = entries.iter().map(|e| (e.row, e.col)).collect();
        positions.sort_unstable();
        for w in positions.windows(2) {
            if w[0] == w[1] {
                return Err(Error::MatrixStructure(format!(
                    "duplicate entry at ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        Ok(Self { n, entries })
    }

    /// Convenience constructor from `(row, col, value)` triplets.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(
            n,
            triplets
                .iter()
                .map(|&(row, col, value)| Entry { row, col, value })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_a_valid_matrix() {
        let m = CooMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, 3.0), (1, 1, 4.0)]).unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(m.nnz(), 3);
    }

    #[test]
    fn rejects_out_of_bounds_indices() {
        let err = CooMatrix::from_triplets(2, &[(0, 0, 1.0), (2, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::MatrixStructure(_)), "{err}");
        assert!(err.to_string().contains("(2, 0)"));
    }

    #[test]
    fn rejects_duplicate_positions() {
        let err = CooMatrix::from_triplets(3, &[(1, 2, 1.0), (0, 0, 1.0), (1, 2, 5.0)]).unwrap_err();
        assert!(err.to_string().contains("duplicate entry at (1, 2)"), "{err}");
    }

    #[test]
    fn rejects_explicit_zeros() {
        let err = CooMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 0.0)]).unwrap_err();
        assert!(err.to_string().contains("explicit zero"), "{err}");
    }

    #[test]
    fn rejects_zero_dimension() {
        assert!(matches!(
            CooMatrix::from_triplets(0, &[]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
