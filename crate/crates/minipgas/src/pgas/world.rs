//! World construction, rank handles, barrier and broadcast collectives.

use std::any::Any;
use std::collections::HashMap;
use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use parking_lot::{Condvar, Mutex};

use crate::error::{Error, Result};
use crate::pgas::engine::{Job, JobKind, RawRef, SchedulePolicy, TransferEngine, WORKER_THREADS};
use crate::pgas::future::{CompletionFuture, OpState};
use crate::pgas::payload::Payload;
use crate::pgas::segment::{Elem, GlobalRef, LocalView, SegId, Segment, Store};
use crate::pgas::stats::CommStats;

/// Rank identifier inside a world: `0..world_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankId(pub usize);

impl std::fmt::Display for RankId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Default barrier/collective deadlock-detection timeout.
pub const DEFAULT_BARRIER_TIMEOUT: Duration = Duration::from_secs(30);

/// Configuration of a world; see [`WorldConfig::run`].
#[derive(Debug, Clone)]
pub struct WorldConfig {
    pub ranks: usize,
    pub barrier_timeout: Duration,
    pub check_overlap: bool,
    /// Optional cap, in bytes, on the shared segments each rank may allocate.
    pub segment_budget_bytes: Option<u64>,
    pub schedule: SchedulePolicy,
}

impl WorldConfig {
    pub fn new(ranks: usize) -> Self {
        Self {
            ranks,
            barrier_timeout: DEFAULT_BARRIER_TIMEOUT,
            check_overlap: false,
            segment_budget_bytes: None,
            schedule: SchedulePolicy::Fifo,
        }
    }

    pub fn barrier_timeout(mut self, timeout: Duration) -> Self {
        self.barrier_timeout = timeout;
        self
    }

    pub fn check_overlap(mut self, enabled: bool) -> Self {
        self.check_overlap = enabled;
        self
    }

    pub fn segment_budget_bytes(mut self, budget: u64) -> Self {
        self.segment_budget_bytes = Some(budget);
        self
    }

    pub fn schedule(mut self, policy: SchedulePolicy) -> Self {
        self.schedule = policy;
        self
    }

    /// Run `program` once per rank, each on its own thread, and return the
    /// per-rank results in rank order.
    ///
    /// A panic or error in any rank surfaces as a world-level error naming
    /// that rank. When several ranks fail, the lowest-numbered failure that
    /// is not a barrier/collective timeout is reported (timeouts are usually
    /// collateral damage of another rank's failure).
    pub fn run<T, F>(&self, program: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(Rank<'_>) -> Result<T> + Sync,
    {
        if self.ranks < 1 {
            return Err(Error::InvalidArgument(
                "a world needs at least one rank".into(),
            ));
        }
        let world = World::new(self.clone());

        let program = &program;
        let joined: Vec<thread::Result<Result<T>>> = thread::scope(|s| {
            let world = &world;
            for w in 0..WORKER_THREADS {
                thread::Builder::new()
                    .name(format!("pgas-xfer{w}"))
                    .spawn_scoped(s, move || world.engine.worker_loop(world))
                    .expect("failed to spawn transfer worker");
            }
            let handles: Vec<_> = (0..self.ranks)
                .map(|i| {
                    let rank = Rank {
                        id: RankId(i),
                        world,
                    };
                    thread::Builder::new()
                        .name(format!("pgas-rank{i}"))
                        .spawn_scoped(s, move || program(rank))
                        .expect("failed to spawn rank")
                })
                .collect();
            let joined = handles.into_iter().map(|h| h.join()).collect();
            world.engine.shutdown();
            joined
        });

        let mut ok = Vec::with_capacity(self.ranks);
        let mut failures: Vec<(RankId, Error)> = Vec::new();
        for (i, res) in joined.into_iter().enumerate() {
            let rank = RankId(i);
            match res {
                Ok(Ok(t)) => ok.push(t),
                Ok(Err(e)) => failures.push((
                    rank,
                    Error::RankFailed {
                        rank,
                        source: Box::new(e),
                    },
                )),
                Err(payload) => failures.push((
                    rank,
                    Error::RankPanicked {
                        rank,
                        message: panic_message(payload),
                    },
                )),
            }
        }
        if failures.is_empty() {
            return Ok(ok);
        }
        let root_cause = failures
            .iter()
            .position(|(_, e)| !is_collateral_timeout(e))
            .unwrap_or(0);
        Err(failures.swap_remove(root_cause).1)
    }
}

/// Run `program` on `ranks` SPMD ranks with default world settings.
pub fn spawn_world<T, F>(ranks: usize, program: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Rank<'_>) -> Result<T> + Sync,
{
    WorldConfig::new(ranks).run(program)
}

fn panic_message(payload: Box<dyn Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".into()
    }
}

fn is_collateral_timeout(e: &Error) -> bool {
    match e {
        Error::RankFailed { source, .. } => matches!(
            **source,
            Error::BarrierTimeout { .. } | Error::CollectiveTimeout { .. }
        ),
        _ => false,
    }
}

// Segment ids are drawn from a process-wide counter so references from one
// world can never alias a segment of another world.
static NEXT_SEG_ID: AtomicU64 = AtomicU64::new(1);

struct Registry {
    map: HashMap<(RankId, SegId), Segment>,
    used_bytes: Vec<u64>,
}

#[derive(Default)]
struct BarrierState {
    arrived: usize,
    generation: u64,
    poisoned: bool,
}

struct RvState {
    generation: u64,
    arrived: usize,
    leaving: usize,
    root: Option<RankId>,
    root_bytes: usize,
    payload: Option<Arc<dyn Any + Send + Sync>>,
    mismatch: Option<String>,
}

/// Shared state of one SPMD world.
pub struct World {
    config: WorldConfig,
    registry: Mutex<Registry>,
    stats: Mutex<CommStats>,
    barrier: Mutex<BarrierState>,
    barrier_cv: Condvar,
    coll: Mutex<RvState>,
    coll_cv: Condvar,
    journal: Mutex<HashMap<(RankId, SegId), Vec<(usize, usize)>>>,
    pub(crate) engine: TransferEngine,
}

impl World {
    fn new(config: WorldConfig) -> Self {
        let ranks = config.ranks;
        let engine = TransferEngine::new(config.schedule);
        Self {
            config,
            registry: Mutex::new(Registry {
                map: HashMap::new(),
                used_bytes: vec![0; ranks],
            }),
            stats: Mutex::new(CommStats::new(ranks)),
            barrier: Mutex::new(BarrierState::default()),
            barrier_cv: Condvar::new(),
            coll: Mutex::new(RvState {
                generation: 0,
                arrived: 0,
                leaving: 0,
                root: None,
                root_bytes: 0,
                payload: None,
                mismatch: None,
            }),
            coll_cv: Condvar::new(),
            journal: Mutex::new(HashMap::new()),
            engine,
        }
    }

    pub(crate) fn store_of(&self, owner: RankId, segment: SegId) -> Store {
        self.registry
            .lock()
            .map
            .get(&(owner, segment))
            .map(|s| s.store.clone())
            .expect("segment validated at submission")
    }

    fn lookup_store(&self, owner: RankId, segment: SegId) -> Result<Store> {
        self.registry
            .lock()
            .map
            .get(&(owner, segment))
            .map(|s| s.store.clone())
            .ok_or(Error::UnknownSegment { owner, segment })
    }

    pub(crate) fn account_transfer(&self, src: RankId, dst: RankId, bytes: u64) {
        self.stats.lock().record_transfer(src, dst, bytes);
    }

    fn journal_write(&self, owner: RankId, segment: SegId, range: Range<usize>) -> Result<()> {
        if !self.config.check_overlap || range.is_empty() {
            return Ok(());
        }
        let mut journal = self.journal.lock();
        let entry = journal.entry((owner, segment)).or_default();
        for &(a, b) in entry.iter() {
            if range.start < b && a < range.end {
                return Err(Error::WriteOverlap {
                    owner,
                    segment,
                    first: (a, b),
                    second: (range.start, range.end),
                });
            }
        }
        entry.push((range.start, range.end));
        Ok(())
    }

    fn barrier_enter(&self, rank: RankId) -> Result<()> {
        let timeout = self.config.barrier_timeout;
        let deadline = Instant::now() + timeout;
        let expected = self.config.ranks;
        let mut g = self.barrier.lock();
        if g.poisoned {
            return Err(Error::BarrierTimeout {
                rank,
                timeout,
                arrived: g.arrived,
                expected,
            });
        }
        g.arrived += 1;
        if g.arrived == expected {
            g.arrived = 0;
            g.generation += 1;
            // The barrier closes a phase: the overlap journal restarts empty.
            self.journal.lock().clear();
            self.barrier_cv.notify_all();
            return Ok(());
        }
        let generation = g.generation;
        while g.generation == generation {
            if g.poisoned {
                return Err(Error::BarrierTimeout {
                    rank,
                    timeout,
                    arrived: g.arrived,
                    expected,
                });
            }
            if self.barrier_cv.wait_until(&mut g, deadline).timed_out() {
                g.poisoned = true;
                let arrived = g.arrived;
                self.barrier_cv.notify_all();
                return Err(Error::BarrierTimeout {
                    rank,
                    timeout,
                    arrived,
                    expected,
                });
            }
        }
        Ok(())
    }

    fn broadcast_impl<T: Payload>(&self, me: RankId, value: T, root: RankId) -> Result<T> {
        if root.0 >= self.config.ranks {
            return Err(Error::InvalidArgument(format!(
                "broadcast root {root} out of range for {} ranks",
                self.config.ranks
            )));
        }
        if self.config.ranks == 1 {
            return Ok(value);
        }
        let timeout = self.config.barrier_timeout;
        let deadline = Instant::now() + timeout;
        let mut g = self.coll.lock();
        while g.leaving > 0 {
            if self.coll_cv.wait_until(&mut g, deadline).timed_out() {
                return Err(Error::CollectiveTimeout { rank: me, timeout });
            }
        }
        let generation = g.generation;
        if g.arrived == 0 {
            g.root = Some(root);
        } else if g.root != Some(root) {
            let first = g.root.unwrap();
            g.mismatch.get_or_insert_with(|| {
                format!("ranks disagree on broadcast root ({first} vs {root})")
            });
        }
        if me == root {
            g.root_bytes = value.payload_bytes();
            g.payload = Some(Arc::new(value.clone()));
        }
        g.arrived += 1;
        if g.arrived == self.config.ranks {
            g.arrived = 0;
            g.generation += 1;
            g.leaving = self.config.ranks;
            if g.mismatch.is_none() {
                self.stats
                    .lock()
                    .record_broadcast(g.root.unwrap(), g.root_bytes as u64);
            }
            self.coll_cv.notify_all();
        } else {
            while g.generation == generation {
                if self.coll_cv.wait_until(&mut g, deadline).timed_out() {
                    return Err(Error::CollectiveTimeout { rank: me, timeout });
                }
            }
        }
        let outcome = if let Some(msg) = g.mismatch.clone() {
            Err(Error::CollectiveMismatch(msg))
        } else if me == root {
            Ok(value)
        } else {
            match g.payload.as_ref().expect("root deposited").clone().downcast::<T>() {
                Ok(arc) => Ok((*arc).clone()),
                Err(_) => Err(Error::CollectiveMismatch(
                    "broadcast payload types differ across ranks".into(),
                )),
            }
        };
        g.leaving -= 1;
        if g.leaving == 0 {
            g.payload = None;
            g.root = None;
            g.root_bytes = 0;
            g.mismatch = None;
            self.coll_cv.notify_all();
        }
        outcome
    }
}

/// Per-rank handle to the world; the sole API surface rank programs use.
#[derive(Clone, Copy)]
pub struct Rank<'w> {
    id: RankId,
    world: &'w World,
}

impl<'w> Rank<'w> {
    pub fn id(&self) -> RankId {
        self.id
    }

    pub fn world_size(&self) -> usize {
        self.world.config.ranks
    }

    /// Allocate a zero-initialized shared segment of `len` elements owned by
    /// this rank and return a reference spanning all of it.
    pub fn allocate_shared<T: Elem>(&self, len: usize) -> Result<GlobalRef<T>> {
        let bytes = (len * T::KIND.size_bytes()) as u64;
        let mut reg = self.world.registry.lock();
        if let Some(budget) = self.world.config.segment_budget_bytes {
            let used = reg.used_bytes[self.id.0];
            if used + bytes > budget {
                return Err(Error::SegmentBudget {
                    rank: self.id,
                    requested: bytes,
                    used,
                    budget,
                });
            }
        }
        reg.used_bytes[self.id.0] += bytes;
        let id = SegId(NEXT_SEG_ID.fetch_add(1, Ordering::Relaxed));
        reg.map.insert(
            (self.id, id),
            Segment {
                store: T::wrap(vec![T::default(); len]),
            },
        );
        Ok(GlobalRef::new(self.id, id, 0, len))
    }

    /// One-sided put: copy `src` (snapshotted now) into the remote span `dst`.
    ///
    /// Accounted as one message of `span * element size` bytes on the ordered
    /// pair (this rank -> dst owner); a self-transfer is tallied as a local
    /// copy instead. Zero-span transfers complete immediately.
    pub fn rput<T: Elem>(&self, src: &[T], dst: &GlobalRef<T>) -> Result<CompletionFuture> {
        let store = self.world.lookup_store(dst.owner(), dst.segment())?;
        debug_assert_eq!(store.kind(), T::KIND);
        if src.len() != dst.span() {
            return Err(Error::SpanMismatch {
                expected: dst.span(),
                actual: src.len(),
            });
        }
        if dst.is_empty() {
            self.world.account_transfer(self.id, dst.owner(), 0);
            return Ok(CompletionFuture::ready());
        }
        self.world
            .journal_write(dst.owner(), dst.segment(), dst.abs_range())?;
        let op = OpState::new();
        self.world.engine.submit(Job {
            dst: RawRef::of(dst),
            kind: T::make_put(src.to_vec()),
            flow: (self.id, dst.owner()),
            bytes: (dst.span() * T::KIND.size_bytes()) as u64,
            op: op.clone(),
        });
        Ok(CompletionFuture::from_op(op))
    }

    /// One-sided get: copy the remote span `src` into `dst`, which must be a
    /// span owned by the calling rank.
    ///
    /// Accounted as one message on the ordered pair (src owner -> this rank).
    pub fn rget<T: Elem>(
        &self,
        src: &GlobalRef<T>,
        dst: &GlobalRef<T>,
    ) -> Result<CompletionFuture> {
        if dst.owner() != self.id {
            return Err(Error::NotOwner {
                caller: self.id,
                owner: dst.owner(),
            });
        }
        self.world.lookup_store(src.owner(), src.segment())?;
        self.world.lookup_store(dst.owner(), dst.segment())?;
        if src.span() != dst.span() {
            return Err(Error::SpanMismatch {
                expected: src.span(),
                actual: dst.span(),
            });
        }
        if src.is_empty() {
            self.world.account_transfer(src.owner(), self.id, 0);
            return Ok(CompletionFuture::ready());
        }
        self.world
            .journal_write(dst.owner(), dst.segment(), dst.abs_range())?;
        let op = OpState::new();
        self.world.engine.submit(Job {
            dst: RawRef::of(dst),
            kind: JobKind::Get {
                src: RawRef::of(src),
            },
            flow: (src.owner(), self.id),
            bytes: (src.span() * T::KIND.size_bytes()) as u64,
            op: op.clone(),
        });
        Ok(CompletionFuture::from_op(op))
    }

    /// Direct read/write access to an owned span. Never accounted.
    pub fn local_view<T: Elem>(&self, r: &GlobalRef<T>) -> Result<LocalView<T>> {
        if r.owner() != self.id {
            return Err(Error::NotOwner {
                caller: self.id,
                owner: r.owner(),
            });
        }
        let store = self.world.lookup_store(r.owner(), r.segment())?;
        let lock = T::open(&store).expect("reference kind matches segment kind");
        let guard = lock.write_arc();
        Ok(LocalView::new(guard, r.abs_range()))
    }

    /// Collective synchronization point.
    ///
    /// After every rank has passed the barrier, all transfers whose futures
    /// were waited before entering are visible to all ranks, and
    /// [`Rank::comm_stats`] snapshots taken by different ranks agree. Ranks
    /// stuck longer than the configured timeout get a barrier-timeout error.
    pub fn barrier(&self) -> Result<()> {
        self.world.barrier_enter(self.id)
    }

    /// Collective broadcast: every rank passes a value and the root's copy is
    /// returned on all ranks. Accounted as `world_size - 1` messages from the
    /// root. Ranks disagreeing on the root is a collective-mismatch error.
    pub fn broadcast<T: Payload>(&self, value: T, root: RankId) -> Result<T> {
        self.world.broadcast_impl(self.id, value, root)
    }

    /// Convenience collective built from `world_size` broadcasts: returns
    /// every rank's `value`, indexed by rank.
    pub fn all_gather<T: Payload>(&self, value: T) -> Result<Vec<T>> {
        (0..self.world.config.ranks)
            .map(|r| self.broadcast(value.clone(), RankId(r)))
            .collect()
    }

    /// Snapshot of the world's communication counters.
    pub fn comm_stats(&self) -> CommStats {
        self.world.stats.lock().clone()
    }
}
