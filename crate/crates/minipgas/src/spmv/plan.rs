//! Communication planning for distributed SpMV.
//!
//! Planning is pure: every rank derives the full exchange structure from the
//! gathered per-rank requirement lists, so all ranks agree on buffer layouts
//! without further negotiation.

use std::collections::BTreeSet;

use crate::pgas::RankId;
use crate::sparse::EllpackMatrix;
use crate::spmv::layout::BlockCyclicLayout;

pub use crate::pgas::PredictedVolume;

/// One rank's rows of a padded matrix, in local row order.
///
/// Column indices stay global; `vals[local*r_nz + k]` / `cols[...]` mirror the
/// full matrix's slot layout restricted to owned rows.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSlice {
    pub r_nz: usize,
    pub diag: Vec<f64>,
    pub vals: Vec<f64>,
    pub cols: Vec<i32>,
}

/// Extract the rows owned by `rank` from a padded matrix.
pub fn slice_rows(m: &EllpackMatrix, layout: &BlockCyclicLayout, rank: RankId) -> MatrixSlice {
    assert_eq!(m.n(), layout.n_padded(), "matrix must be padded to the layout");
    let r_nz = m.r_nz();
    let local_len = layout.local_len();
    let mut diag = Vec::with_capacity(local_len);
    let mut vals = Vec::with_capacity(local_len * r_nz);
    let mut cols = Vec::with_capacity(local_len * r_nz);
    for local in 0..local_len {
        let g = layout.global_index(rank, local);
        diag.push(m.diag()[g]);
        vals.extend_from_slice(&m.offdiag_vals()[g * r_nz..(g + 1) * r_nz]);
        cols.extend_from_slice(&m.offdiag_cols()[g * r_nz..(g + 1) * r_nz]);
    }
    MatrixSlice { r_nz, diag, vals, cols }
}

/// Global column indices a rank's slice reads from other ranks: every column
/// of a genuine (nonzero) slot whose owner is not `me`, sorted and unique.
/// Padding slots (value 0, own-row column) never contribute.
pub fn slice_requirements(
    slice: &MatrixSlice,
    layout: &BlockCyclicLayout,
    me: RankId,
) -> Vec<usize> {
    let mut needed = BTreeSet::new();
    for (slot, &v) in slice.vals.iter().enumerate() {
        if v != 0.0 {
            let g = slice.cols[slot] as usize;
            if layout.owner_of_row(g) != me {
                needed.insert(g);
            }
        }
    }
    needed.into_iter().collect()
}

/// Block-wise pull plan: for each consumer rank, the sorted global block ids
/// it must fetch whole. A block is listed iff it contains at least one
/// required index; it is always owned by another rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanV1 {
    pub blocks: Vec<Vec<usize>>,
}

pub fn plan_v1(requirements: &[Vec<usize>], layout: &BlockCyclicLayout) -> PlanV1 {
    let blocks = requirements
        .iter()
        .map(|req| {
            let set: BTreeSet<usize> = req.iter().map(|&g| layout.block_of(g)).collect();
            set.into_iter().collect()
        })
        .collect();
    PlanV1 { blocks }
}

/// Condensed push plan: `indices[d][s]` is the sorted unique list of global
/// indices owned by rank `s` that rank `d` needs. Rank `d`'s Shared Receive
/// Buffer concatenates the source regions in rank order without gaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanV2 {
    pub indices: Vec<Vec<Vec<usize>>>,
}

impl PlanV2 {
    /// Receive-buffer size on rank `d`.
    pub fn srb_len(&self, d: RankId) -> usize {
        self.indices[d.0].iter().map(Vec::len).sum()
    }

    /// Offset of source `s`'s region inside rank `d`'s receive buffer.
    pub fn srb_offset(&self, d: RankId, s: RankId) -> usize {
        self.indices[d.0][..s.0].iter().map(Vec::len).sum()
    }
}

pub fn plan_v2(requirements: &[Vec<usize>], layout: &BlockCyclicLayout) -> PlanV2 {
    let ranks = requirements.len();
    let indices = requirements
        .iter()
        .map(|req| {
            let mut per_source = vec![Vec::new(); ranks];
            for &g in req {
                // Requirement lists are sorted, so per-source lists stay sorted.
                per_source[layout.owner_of_row(g).0].push(g);
            }
            per_source
        })
        .collect();
    PlanV2 { indices }
}

const ELEM_BYTES: u64 = 8; // x travels as f64

/// Volume of one v1 exchange: each needed block is one message of a full
/// block's worth of bytes from its owner to the consumer.
pub fn predict_v1(plan: &PlanV1, layout: &BlockCyclicLayout) -> PredictedVolume {
    let mut v = PredictedVolume::new(plan.blocks.len());
    for (d, blocks) in plan.blocks.iter().enumerate() {
        for &b in blocks {
            v.add(
                layout.owner_of_block(b),
                RankId(d),
                1,
                layout.block() as u64 * ELEM_BYTES,
            );
        }
    }
    v
}

/// Volume of one v2 exchange: one message per communicating pair, carrying
/// exactly the unique needed elements.
pub fn predict_v2(plan: &PlanV2) -> PredictedVolume {
    let ranks = plan.indices.len();
    let mut v = PredictedVolume::new(ranks);
    for (d, per_source) in plan.indices.iter().enumerate() {
        for (s, list) in per_source.iter().enumerate() {
            if !list.is_empty() {
                v.add(RankId(s), RankId(d), 1, list.len() as u64 * ELEM_BYTES);
            }
        }
    }
    v
}
