//! Modified ELLPACK storage: a dense diagonal array plus `r_nz` fixed-width
//! off-diagonal slots per row, stored in two flat arrays.

use crate::error::{Error, Result};
use crate::sparse::coo::{CooMatrix, Entry};

/// Square sparse matrix split into diagonal and off-diagonal parts.
///
/// `diag[r]` holds the (always nonzero) diagonal entry of row `r`. Row `r`'s
/// off-diagonal entries occupy `offdiag_vals[r*r_nz .. (r+1)*r_nz]` and the
/// matching `offdiag_cols` range, genuine entries first in ascending column
/// order, then padding slots with value `0.0` and the row's own index as
/// column, so every slot can be multiplied unconditionally.
#[derive(Debug, Clone, PartialEq)]
pub struct EllpackMatrix {
    n: usize,
    r_nz: usize,
    diag: Vec<f64>,
    offdiag_vals: Vec<f64>,
    offdiag_cols: Vec<i32>,
}

impl EllpackMatrix {
    /// Convert from COO form. `r_nz` becomes the maximum off-diagonal count
    /// over all rows. Every row must carry a nonzero diagonal entry.
    pub fn from_coo(m: &CooMatrix) -> Result<Self> {
        let n = m.n();
        if n > i32::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "dimension {n} exceeds int32 column storage"
            )));
        }
        let mut diag = vec![0.0f64; n];
        let mut has_diag = vec![false; n];
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for e in m.entries() {
            if e.row == e.col {
                diag[e.row] = e.value;
                has_diag[e.row] = true;
            } else {
                rows[e.row].push((e.col, e.value));
            }
        }
        for r in 0..n {
            if !has_diag[r] {
                return Err(Error::MatrixStructure(format!(
                    "row {r} has no diagonal entry"
                )));
            }
            // CooMatrix already rejects stored zeros, so diag[r] != 0 here.
            debug_assert_ne!(diag[r], 0.0);
        }
        let r_nz = rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut offdiag_vals = vec![0.0f64; n * r_nz];
        let mut offdiag_cols = vec![0i32; n * r_nz];
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable_by_key(|&(c, _)| c);
            for (k, slot) in (0..r_nz).enumerate() {
                let (col, val) = row.get(k).copied().unwrap_or((r, 0.0));
                offdiag_vals[r * r_nz + slot] = val;
                offdiag_cols[r * r_nz + slot] = col as i32;
            }
        }
        Ok(Self {
            n,
            r_nz,
            diag,
            offdiag_vals,
            offdiag_cols,
        })
    }

    /// Extend to `n_padded` rows by appending identity rows (diagonal `1.0`,
    /// all off-diagonal slots padding). Column indices of original rows are
    /// untouched, so padded columns are referenced by no genuine entry.
    pub fn with_identity_padding(&self, n_padded: usize) -> Result<Self> {
        if n_padded < self.n {
            return Err(Error::InvalidArgument(format!(
                "padded dimension {n_padded} smaller than {}",
                self.n
            )));
        }
        if n_padded > i32::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "padded dimension {n_padded} exceeds int32 column storage"
            )));
        }
        let mut diag = self.diag.clone();
        diag.resize(n_padded, 1.0);
        let mut offdiag_vals = self.offdiag_vals.clone();
        let mut offdiag_cols = self.offdiag_cols.clone();
        offdiag_vals.resize(n_padded * self.r_nz, 0.0);
        offdiag_cols.resize(n_padded * self.r_nz, 0);
        for r in self.n..n_padded {
            for k in 0..self.r_nz {
                offdiag_cols[r * self.r_nz + k] = r as i32;
            }
        }
        Ok(Self {
            n: n_padded,
            r_nz: self.r_nz,
            diag,
            offdiag_vals,
            offdiag_cols,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Off-diagonal slots per row.
    pub fn r_nz(&self) -> usize {
        self.r_nz
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag_vals(&self) -> &[f64] {
        &self.offdiag_vals
    }

    pub fn offdiag_cols(&self) -> &[i32] {
        &self.offdiag_cols
    }

    /// Number of stored off-diagonal slots holding a genuine nonzero.
    pub fn nnz_offdiag(&self) -> usize {
        self.offdiag_vals.iter().filter(|&&v| v != 0.0).count()
    }

    /// Floating-point operations of one multiply: one multiply and one add
    /// per diagonal entry and per genuine off-diagonal entry.
    pub fn flops_count(&self) -> u64 {
        2 * (self.n as u64 + self.nnz_offdiag() as u64)
    }

    /// All genuine nonzeros: the diagonal, then each row's real slots.
    pub fn iter_nonzeros(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |r| {
            let diag = std::iter::once((r, r, self.diag[r]));
            let offs = (0..self.r_nz).filter_map(move |k| {
                let v = self.offdiag_vals[r * self.r_nz + k];
                (v != 0.0).then(|| (r, self.offdiag_cols[r * self.r_nz + k] as usize, v))
            });
            diag.chain(offs)
        })
    }

    /// Back-conversion; together with [`EllpackMatrix::from_coo`] this is an
    /// exact round trip on the nonzero set.
    pub fn to_coo(&self) -> Result<CooMatrix> {
        CooMatrix::new(
            self.n,
            self.iter_nonzeros()
                .map(|(row, col, value)| Entry { row, col, value })
                .collect(),
        )
    }
}

/// Serial multiply `y = M x` with a pinned accumulation order: for each row,
/// the diagonal term first, then the stored off-diagonal slots left to right
/// (ascending column order, padding contributing an exact `0.0` term).
pub fn spmv_serial(m: &EllpackMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != m.n {
        return Err(Error::InvalidArgument(format!(
            "vector length {} does not match dimension {}",
            x.len(),
            m.n
        )));
    }
    let r_nz = m.r_nz;
    let mut y = vec![0.0f64; m.n];
    for r in 0..m.n {
        let mut acc = m.diag[r] * x[r];
        let base = r * r_nz;
        for k in 0..r_nz {
            acc += m.offdiag_vals[base + k] * x[m.offdiag_cols[base + k] as usize];
        }
        y[r] = acc;
    }
    Ok(y)
}

/// Independent oracle for [`spmv_serial`]: evaluates `y = M x` over a dense
/// expansion of the COO form, visiting *every* column of every row.
///
/// Accumulation order matches the serial multiply — diagonal first, then all
/// other columns in ascending order (absent entries contribute `0.0 * x[j]`)
/// — so agreement is exact, not approximate.
pub fn spmv_dense_oracle(m: &CooMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != m.n() {
        return Err(Error::InvalidArgument(format!(
            "vector length {} does not match dimension {}",
            x.len(),
            m.n()
        )));
    }
    let n = m.n();
    let mut dense_rows: Vec<Vec<f64>> = vec![vec![0.0; n]; n];
    for e in m.entries() {
        dense_rows[e.row][e.col] = e.value;
    }
    let mut y = vec![0.0f64; n];
    for r in 0..n {
        let row = &dense_rows[r];
        let mut acc = row[r] * x[r];
        for j in 0..n {
            if j != r {
                acc += row[j] * x[j];
            }
        }
        y[r] = acc;
    }
    Ok(y)
}
