//! In-process PGAS runtime.
//!
//! A *world* is a fixed set of SPMD ranks running the same program
//! concurrently, one OS thread per rank, inside a single process. Ranks own
//! zero-initialized shared *segments*; any rank holding a [`GlobalRef`] may
//! read or write a segment through one-sided [`Rank::rput`] / [`Rank::rget`]
//! transfers that return [`CompletionFuture`]s. The owning rank gets direct,
//! unaccounted access through [`Rank::local_view`].
//!
//! Visibility contract: a transfer is guaranteed visible to every rank after
//! its initiator has waited on the returned future *and* all ranks have passed
//! a subsequent [`Rank::barrier`]. Nothing stronger is promised; in particular
//! a third rank must not assume it can observe a transfer before that barrier.
//!
//! Every transfer is accounted in [`CommStats`]: one message and
//! `span * element size` payload bytes per ordered (source, destination) rank
//! pair, with self-transfers tallied separately as local copies. Accounting is
//! deterministic: two executions of the same deterministic program produce
//! identical [`CommStats`].

mod engine;
mod future;
mod payload;
mod segment;
mod stats;
mod world;

pub use engine::SchedulePolicy;
pub use future::{when_all, CompletionFuture, FutureState};
pub use payload::Payload;
pub use segment::{Elem, ElemKind, GlobalRef, LocalView, SegId};
pub use stats::{CommStats, PairCounters, PredictedVolume};
pub use world::{spawn_world, Rank, RankId, WorldConfig, DEFAULT_BARRIER_TIMEOUT};
