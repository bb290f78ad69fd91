//! Driver for a complete distributed SpMV run: spawn a world, iterate
//! exchange/multiply/advance, and verify communication volume against the
//! analytic model.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::pgas::{CommStats, SchedulePolicy, WorldConfig};
use crate::sparse::EllpackMatrix;
use crate::spmv::layout::{pad_vector, BlockCyclicLayout};
use crate::spmv::plan::PredictedVolume;
use crate::spmv::worker::SpmvWorker;
use crate::spmv::Strategy;

#[derive(Debug, Clone)]
pub struct SpmvOptions {
    pub ranks: usize,
    pub block: usize,
    pub iters: usize,
    pub strategy: Strategy,
    pub schedule: SchedulePolicy,
    /// Enable the runtime's same-window write-overlap detector.
    pub check_overlap: bool,
}

#[derive(Debug, Clone)]
pub struct SpmvReport {
    pub strategy: Strategy,
    pub ranks: usize,
    pub block: usize,
    pub iters: usize,
    /// x after `iters` applications of the matrix, unpadded length.
    pub x_final: Vec<f64>,
    pub wall_s: f64,
    pub avg_step_s: f64,
    pub gflops: f64,
    /// Transfer counters accumulated during the timed loop only.
    pub measured: CommStats,
    /// Model volume for the whole loop (per-exchange volume times `iters`).
    pub predicted: PredictedVolume,
    /// Exact per-pair equality of measured and predicted counters.
    pub volume_match: bool,
}

struct RankOutcome {
    x: Vec<f64>,
    wall: f64,
    measured: CommStats,
    predicted: PredictedVolume,
}

/// Run `iters` steps of `{ exchange ghosts; y := M x; x := y }` on
/// `opts.ranks` ranks and report timing plus exact communication accounting.
pub fn run_spmv(m: &EllpackMatrix, x0: &[f64], opts: &SpmvOptions) -> Result<SpmvReport> {
    if opts.iters < 1 {
        return Err(Error::InvalidArgument("at least one iteration required".into()));
    }
    if x0.len() != m.n() {
        return Err(Error::InvalidArgument(format!(
            "x0 length {} does not match matrix dimension {}",
            x0.len(),
            m.n()
        )));
    }
    let layout = BlockCyclicLayout::new(m.n(), opts.block, opts.ranks)?;
    let padded = m.with_identity_padding(layout.n_padded())?;
    let x0_padded = pad_vector(x0, layout.n_padded());

    let outcomes = WorldConfig::new(opts.ranks)
        .schedule(opts.schedule)
        .check_overlap(opts.check_overlap)
        .run(|rank| {
            let mut w = SpmvWorker::new(rank, &padded, layout, opts.strategy)?;
            w.set_x(&x0_padded)?;
            rank.barrier()?;
            let base = rank.comm_stats(); // setup traffic ends here
            rank.barrier()?;
            let t0 = Instant::now();
            for _ in 0..opts.iters {
                w.exchange()?;
                w.multiply()?;
                w.advance()?;
            }
            rank.barrier()?;
            let wall = t0.elapsed().as_secs_f64();
            let measured = rank.comm_stats().delta_since(&base);
            Ok(RankOutcome {
                x: w.read_x()?,
                wall,
                measured,
                predicted: w.predicted().clone(),
            })
        })?;

    let mut x_final = vec![0.0; m.n()];
    for (g, slot) in x_final.iter_mut().enumerate() {
        let (owner, local) = layout.locate(g);
        *slot = outcomes[owner.0].x[local];
    }
    // Accounting is deterministic: every rank saw the same counters.
    let measured = outcomes[0].measured.clone();
    debug_assert!(outcomes.iter().all(|o| o.measured == measured));
    let predicted = outcomes[0].predicted.scaled(opts.iters as u64);
    let volume_match = predicted.matches(&measured);

    let wall_s = outcomes.iter().map(|o| o.wall).fold(0.0, f64::max);
    let flops = m.flops_count() * opts.iters as u64;
    let gflops = if wall_s > 0.0 {
        flops as f64 / wall_s / 1e9
    } else {
        0.0
    };

    Ok(SpmvReport {
        strategy: opts.strategy,
        ranks: opts.ranks,
        block: opts.block,
        iters: opts.iters,
        x_final,
        wall_s,
        avg_step_s: wall_s / opts.iters as f64,
        gflops,
        measured,
        predicted,
        volume_match,
    })
}
