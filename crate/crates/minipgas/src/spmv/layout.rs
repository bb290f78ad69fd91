//! Block-cyclic distribution of vector/matrix rows over ranks.
//!
//! Rows are grouped into blocks of `block` consecutive indices; block `b` is
//! owned by rank `b % ranks`. Block `mb` of rank `r` (its `mb`-th owned block)
//! covers global rows `[(mb*ranks + r)*block, (mb*ranks + r + 1)*block)`.
//! The dimension is padded up to the next multiple of `block * ranks` so that
//! every rank owns the same number of whole blocks.

use crate::error::{Error, Result};
use crate::pgas::RankId;

/// Row-ownership map of one distributed run. Copyable and purely arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockCyclicLayout {
    n: usize,
    n_padded: usize,
    block: usize,
    ranks: usize,
}

impl BlockCyclicLayout {
    pub fn new(n: usize, block: usize, ranks: usize) -> Result<Self> {
        if n < 1 || block < 1 || ranks < 1 {
            return Err(Error::InvalidArgument(format!(
                "layout needs n, block and ranks all >= 1 (got n={n}, block={block}, ranks={ranks})"
            )));
        }
        let stride = block
            .checked_mul(ranks)
            .ok_or_else(|| Error::InvalidArgument("block * ranks overflows".into()))?;
        let n_padded = n.div_ceil(stride) * stride;
        Ok(Self {
            n,
            n_padded,
            block,
            ranks,
        })
    }

    /// Original (unpadded) dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Padded dimension: the smallest multiple of `block * ranks` at least `n`.
    pub fn n_padded(&self) -> usize {
        self.n_padded
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn ranks(&self) -> usize {
        self.ranks
    }

    /// Number of appended padding rows.
    pub fn padding_rows(&self) -> usize {
        self.n_padded - self.n
    }

    pub fn total_blocks(&self) -> usize {
        self.n_padded / self.block
    }

    /// Blocks owned by each rank (identical for all ranks).
    pub fn blocks_per_rank(&self) -> usize {
        self.total_blocks() / self.ranks
    }

    /// Rows owned by each rank (identical for all ranks).
    pub fn local_len(&self) -> usize {
        self.blocks_per_rank() * self.block
    }

    /// Global block index containing global row `g`.
    pub fn block_of(&self, g: usize) -> usize {
        debug_assert!(g < self.n_padded);
        g / self.block
    }

    pub fn owner_of_block(&self, b: usize) -> RankId {
        debug_assert!(b < self.total_blocks());
        RankId(b % self.ranks)
    }

    pub fn owner_of_row(&self, g: usize) -> RankId {
        self.owner_of_block(self.block_of(g))
    }

    /// Owner and owner-local index of global row `g`.
    pub fn locate(&self, g: usize) -> (RankId, usize) {
        let b = self.block_of(g);
        let mb = b / self.ranks; // position among the owner's blocks
        (RankId(b % self.ranks), mb * self.block + g % self.block)
    }

    /// Owner-local index of global row `g` (whoever the owner is).
    pub fn local_index(&self, g: usize) -> usize {
        self.locate(g).1
    }

    /// Global row behind `rank`-local index `local`.
    pub fn global_index(&self, rank: RankId, local: usize) -> usize {
        debug_assert!(rank.0 < self.ranks);
        debug_assert!(local < self.local_len());
        let mb = local / self.block;
        (mb * self.ranks + rank.0) * self.block + local % self.block
    }

    /// Global rows covered by global block `b`.
    pub fn block_rows(&self, b: usize) -> std::ops::Range<usize> {
        debug_assert!(b < self.total_blocks());
        b * self.block..(b + 1) * self.block
    }
}

/// Zero-extend `x` to the padded dimension.
pub fn pad_vector(x: &[f64], n_padded: usize) -> Vec<f64> {
    debug_assert!(x.len() <= n_padded);
    let mut padded = x.to_vec();
    padded.resize(n_padded, 0.0);
    padded
}
