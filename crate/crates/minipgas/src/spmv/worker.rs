//! Per-rank state of a distributed SpMV run.
//!
//! A worker owns shared segments for its matrix slice, its x and y rows, and
//! the strategy-specific transfer buffers. Construction is collective (all
//! ranks must call it together); so are [`SpmvWorker::exchange`] and the
//! barrier-free local steps in between.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::pgas::{when_all, CompletionFuture, GlobalRef, Rank, RankId};
use crate::sparse::EllpackMatrix;
use crate::spmv::layout::BlockCyclicLayout;
use crate::spmv::plan::{
    plan_v1, plan_v2, predict_v1, predict_v2, slice_requirements, slice_rows, PredictedVolume,
};
use crate::spmv::Strategy;

/// Where one off-diagonal slot reads its x component from.
#[derive(Debug, Clone, Copy)]
enum SlotSource {
    /// Owned row: index into the local x segment.
    Local(usize),
    /// Remote row: index into the ghost array (requirement order).
    Ghost(usize),
}

/// One packed message of the push strategy: which of my x rows go to which
/// offset of the destination's receive buffer.
struct SendPlan {
    dst: RankId,
    dst_offset: usize,
    local_x: Vec<usize>,
}

enum CommState {
    /// v1: pull whole blocks of remote x into a staging segment.
    Pull {
        x_refs: Vec<GlobalRef<f64>>,
        blocks: Vec<usize>,
        stage: GlobalRef<f64>,
        /// Staging position of each required index.
        ghost_src: Vec<usize>,
    },
    /// v2: owners push condensed messages into Shared Receive Buffers.
    Push {
        srb: GlobalRef<f64>,
        srb_refs: Vec<GlobalRef<f64>>,
        sends: Vec<SendPlan>,
        /// Receive-buffer position of each required index.
        ghost_src: Vec<usize>,
    },
}

pub struct SpmvWorker<'w> {
    rank: Rank<'w>,
    layout: BlockCyclicLayout,
    r_nz: usize,
    x_seg: GlobalRef<f64>,
    y_seg: GlobalRef<f64>,
    diag_seg: GlobalRef<f64>,
    vals_seg: GlobalRef<f64>,
    cols_seg: GlobalRef<i32>,
    resolve: Vec<SlotSource>,
    ghosts: Vec<f64>,
    comm: CommState,
    predicted: PredictedVolume,
    /// Bumped on every local change of x; ghosts are valid only for the epoch
    /// they were exchanged in.
    x_epoch: u64,
    ghost_epoch: u64,
}

impl<'w> SpmvWorker<'w> {
    /// Collective constructor: distributes the padded matrix, agrees on the
    /// communication plan, and allocates all transfer buffers.
    pub fn new(
        rank: Rank<'w>,
        padded: &EllpackMatrix,
        layout: BlockCyclicLayout,
        strategy: Strategy,
    ) -> Result<Self> {
        if padded.n() != layout.n_padded() {
            return Err(Error::InvalidArgument(format!(
                "matrix dimension {} does not match padded layout dimension {}",
                padded.n(),
                layout.n_padded()
            )));
        }
        if rank.world_size() != layout.ranks() {
            return Err(Error::InvalidArgument(format!(
                "layout built for {} ranks, world has {}",
                layout.ranks(),
                rank.world_size()
            )));
        }
        let me = rank.id();
        let local_len = layout.local_len();
        let r_nz = padded.r_nz();
        let slice = slice_rows(padded, &layout, me);

        let x_seg = rank.allocate_shared::<f64>(local_len)?;
        let y_seg = rank.allocate_shared::<f64>(local_len)?;
        let diag_seg = rank.allocate_shared::<f64>(local_len)?;
        let vals_seg = rank.allocate_shared::<f64>(local_len * r_nz)?;
        let cols_seg = rank.allocate_shared::<i32>(local_len * r_nz)?;
        rank.local_view(&diag_seg)?.copy_from_slice(&slice.diag);
        rank.local_view(&vals_seg)?.copy_from_slice(&slice.vals);
        rank.local_view(&cols_seg)?.copy_from_slice(&slice.cols);

        let requirements = slice_requirements(&slice, &layout, me);
        let ghost_index: HashMap<usize, usize> = requirements
            .iter()
            .enumerate()
            .map(|(i, &g)| (g, i))
            .collect();
        let resolve = slice
            .cols
            .iter()
            .zip(&slice.vals)
            .map(|(&c, &v)| {
                let g = c as usize;
                if layout.owner_of_row(g) == me {
                    SlotSource::Local(layout.local_index(g))
                } else {
                    debug_assert!(v != 0.0, "padding slots reference their own row");
                    SlotSource::Ghost(ghost_index[&g])
                }
            })
            .collect();
        let ghosts = vec![0.0; requirements.len()];

        let gathered = rank.all_gather(requirements)?;
        let (comm, predicted) = match strategy {
            Strategy::V1 => {
                let plan = plan_v1(&gathered, &layout);
                let predicted = predict_v1(&plan, &layout);
                let blocks = plan.blocks[me.0].clone();
                let stage = rank.allocate_shared::<f64>(blocks.len() * layout.block())?;
                let block_pos: HashMap<usize, usize> =
                    blocks.iter().enumerate().map(|(i, &b)| (b, i)).collect();
                let ghost_src = gathered[me.0]
                    .iter()
                    .map(|&g| block_pos[&layout.block_of(g)] * layout.block() + g % layout.block())
                    .collect();
                let x_refs = rank.all_gather(x_seg)?;
                (CommState::Pull { x_refs, blocks, stage, ghost_src }, predicted)
            }
            Strategy::V2 => {
                let plan = plan_v2(&gathered, &layout);
                let predicted = predict_v2(&plan);
                let srb = rank.allocate_shared::<f64>(plan.srb_len(me))?;
                let srb_refs = rank.all_gather(srb)?;
                let mut srb_pos = HashMap::new();
                for s in 0..layout.ranks() {
                    let base = plan.srb_offset(me, RankId(s));
                    for (j, &g) in plan.indices[me.0][s].iter().enumerate() {
                        srb_pos.insert(g, base + j);
                    }
                }
                let ghost_src = gathered[me.0].iter().map(|&g| srb_pos[&g]).collect();
                let mut sends = Vec::new();
                for d in 0..layout.ranks() {
                    let list = &plan.indices[d][me.0];
                    if d != me.0 && !list.is_empty() {
                        sends.push(SendPlan {
                            dst: RankId(d),
                            dst_offset: plan.srb_offset(RankId(d), me),
                            local_x: list.iter().map(|&g| layout.local_index(g)).collect(),
                        });
                    }
                }
                (CommState::Push { srb, srb_refs, sends, ghost_src }, predicted)
            }
        };

        Ok(Self {
            rank,
            layout,
            r_nz,
            x_seg,
            y_seg,
            diag_seg,
            vals_seg,
            cols_seg,
            resolve,
            ghosts,
            comm,
            predicted,
            x_epoch: 1,
            ghost_epoch: 0, // stale until the first exchange
        })
    }

    /// Load this rank's rows of a padded global vector into the x segment.
    pub fn set_x(&mut self, x_padded: &[f64]) -> Result<()> {
        if x_padded.len() != self.layout.n_padded() {
            return Err(Error::InvalidArgument(format!(
                "initial vector length {} does not match padded dimension {}",
                x_padded.len(),
                self.layout.n_padded()
            )));
        }
        let me = self.rank.id();
        let mut xv = self.rank.local_view(&self.x_seg)?;
        for (local, slot) in xv.iter_mut().enumerate() {
            *slot = x_padded[self.layout.global_index(me, local)];
        }
        drop(xv);
        self.x_epoch += 1;
        Ok(())
    }

    /// Collective ghost refresh for the current x.
    ///
    /// Leading barrier: every rank has finished its local x updates before any
    /// transfer may read or overwrite buffers. Trailing barrier: all transfers
    /// are complete world-wide before ghosts are unpacked.
    pub fn exchange(&mut self) -> Result<()> {
        let rank = self.rank;
        let layout = self.layout;
        rank.barrier()?;
        match &self.comm {
            CommState::Pull { x_refs, blocks, stage, ghost_src } => {
                let mut futures = Vec::with_capacity(blocks.len());
                for (i, &b) in blocks.iter().enumerate() {
                    let owner = layout.owner_of_block(b);
                    let mb = b / layout.ranks();
                    let src = x_refs[owner.0].slice(mb * layout.block(), layout.block())?;
                    let dst = stage.slice(i * layout.block(), layout.block())?;
                    futures.push(rank.rget(&src, &dst)?);
                }
                when_all(futures).wait();
                rank.barrier()?;
                let sv = rank.local_view(stage)?;
                for (i, &p) in ghost_src.iter().enumerate() {
                    self.ghosts[i] = sv[p];
                }
            }
            CommState::Push { srb, srb_refs, sends, ghost_src } => {
                let mut conjoined = CompletionFuture::ready();
                {
                    let xv = rank.local_view(&self.x_seg)?;
                    for send in sends {
                        let packed: Vec<f64> = send.local_x.iter().map(|&l| xv[l]).collect();
                        let dst = srb_refs[send.dst.0].slice(send.dst_offset, packed.len())?;
                        conjoined = when_all([conjoined, rank.rput(&packed, &dst)?]);
                    }
                }
                conjoined.wait();
                rank.barrier()?;
                let sv = rank.local_view(srb)?;
                for (i, &p) in ghost_src.iter().enumerate() {
                    self.ghosts[i] = sv[p];
                }
            }
        }
        self.ghost_epoch = self.x_epoch;
        Ok(())
    }

    /// Local multiply `y := M x` over owned rows: per row the diagonal term
    /// first, then the stored slots left to right, reading remote components
    /// from the ghosts. Purely local; errors if the ghosts are stale.
    pub fn multiply(&self) -> Result<()> {
        if self.ghost_epoch != self.x_epoch {
            return Err(Error::StaleGhosts {
                found: self.ghost_epoch,
                expected: self.x_epoch,
            });
        }
        let diag = self.rank.local_view(&self.diag_seg)?;
        let vals = self.rank.local_view(&self.vals_seg)?;
        let xv = self.rank.local_view(&self.x_seg)?;
        let mut yv = self.rank.local_view(&self.y_seg)?;
        for local in 0..diag.len() {
            let mut acc = diag[local] * xv[local];
            let base = local * self.r_nz;
            for k in 0..self.r_nz {
                let x = match self.resolve[base + k] {
                    SlotSource::Local(l) => xv[l],
                    SlotSource::Ghost(gi) => self.ghosts[gi],
                };
                acc += vals[base + k] * x;
            }
            yv[local] = acc;
        }
        Ok(())
    }

    /// Local step `x := y`, invalidating the ghosts.
    pub fn advance(&mut self) -> Result<()> {
        {
            let yv = self.rank.local_view(&self.y_seg)?;
            let mut xv = self.rank.local_view(&self.x_seg)?;
            xv.copy_from_slice(&yv);
        }
        self.x_epoch += 1;
        Ok(())
    }

    pub fn read_x(&self) -> Result<Vec<f64>> {
        Ok(self.rank.local_view(&self.x_seg)?.to_vec())
    }

    pub fn read_y(&self) -> Result<Vec<f64>> {
        Ok(self.rank.local_view(&self.y_seg)?.to_vec())
    }

    /// Analytic per-pair volume of one exchange with this worker's strategy.
    pub fn predicted(&self) -> &PredictedVolume {
        &self.predicted
    }

    /// Shared-segment references of this rank's matrix slice, for remote
    /// reassembly: (diag, off-diagonal values, off-diagonal columns).
    pub fn slice_segments(&self) -> (GlobalRef<f64>, GlobalRef<f64>, GlobalRef<i32>) {
        (self.diag_seg, self.vals_seg, self.cols_seg)
    }

    pub fn x_segment(&self) -> GlobalRef<f64> {
        self.x_seg
    }
}
