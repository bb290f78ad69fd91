//! Process-grid geometry for the two-dimensional domain decomposition.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pgas::RankId;

/// Rectangular arrangement of ranks over the global grid: `rows * cols` ranks
/// numbered row-major, so rank `r` sits at grid position
/// `(r / cols, r % cols)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProcessGrid {
    rows: usize,
    cols: usize,
}

/// The up-to-four adjacent ranks of a grid position. `None` marks a side on
/// the physical boundary of the global domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Neighbors {
    pub up: Option<RankId>,
    pub down: Option<RankId>,
    pub left: Option<RankId>,
    pub right: Option<RankId>,
}

impl Neighbors {
    /// Number of existing neighbors.
    pub fn count(&self) -> usize {
        [self.up, self.down, self.left, self.right]
            .iter()
            .filter(|n| n.is_some())
            .count()
    }
}

impl ProcessGrid {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "process grid needs at least one rank per dimension, got {rows}x{cols}"
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Total number of ranks the grid requires.
    pub fn ranks(&self) -> usize {
        self.rows * self.cols
    }

    /// Grid position `(row, col)` of a rank.
    pub fn coords(&self, rank: RankId) -> (usize, usize) {
        assert!(rank.0 < self.ranks(), "rank {} outside {self}", rank.0);
        (rank.0 / self.cols, rank.0 % self.cols)
    }

    /// Rank at grid position `(row, col)`.
    pub fn rank_at(&self, row: usize, col: usize) -> RankId {
        assert!(row < self.rows && col < self.cols, "({row},{col}) outside {self}");
        RankId(row * self.cols + col)
    }

    /// Adjacent ranks of `rank`; a missing entry is a physical boundary.
    pub fn neighbors(&self, rank: RankId) -> Neighbors {
        let (r, c) = self.coords(rank);
        Neighbors {
            up: (r > 0).then(|| self.rank_at(r - 1, c)),
            down: (r + 1 < self.rows).then(|| self.rank_at(r + 1, c)),
            left: (c > 0).then(|| self.rank_at(r, c - 1)),
            right: (c + 1 < self.cols).then(|| self.rank_at(r, c + 1)),
        }
    }

    /// Per-rank tile shape for an `m x n` global interior. Every rank gets an
    /// equal `(m / rows) x (n / cols)` tile; the error names the dimension
    /// that does not divide evenly.
    pub fn tile(&self, m: usize, n: usize) -> Result<(usize, usize)> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid interior must be non-empty, got {m}x{n}"
            )));
        }
        if m % self.rows != 0 {
            return Err(Error::InvalidArgument(format!(
                "row count {m} is not divisible by the {} process-grid rows",
                self.rows
            )));
        }
        if n % self.cols != 0 {
            return Err(Error::InvalidArgument(format!(
                "column count {n} is not divisible by the {} process-grid columns",
                self.cols
            )));
        }
        Ok((m / self.rows, n / self.cols))
    }
}

impl fmt::Display for ProcessGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

impl FromStr for ProcessGrid {
    type Err = Error;

    /// Parses `ROWSxCOLS`, e.g. `2x2` or `1x4`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidArgument(format!(
                "invalid process grid `{s}`: expected ROWSxCOLS, e.g. 2x2"
            ))
        };
        let (rows, cols) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let rows = rows.trim().parse::<usize>().map_err(|_| bad())?;
        let cols = cols.trim().parse::<usize>().map_err(|_| bad())?;
        Self::new(rows, cols)
    }
}
