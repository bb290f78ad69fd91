//! Background executor for one-sided transfers.
//!
//! Transfers are validated and enqueued on the initiating rank's thread, then
//! copied by worker threads. The pick order is a scheduling policy: FIFO by
//! default, or seeded random selection to exercise completion-order
//! robustness in tests. Completion order never affects accounting totals.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use parking_lot::{Condvar, Mutex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pgas::future::OpState;
use crate::pgas::segment::{ElemKind, SegId};
use crate::pgas::world::World;
use crate::pgas::RankId;

/// Order in which queued transfers are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulePolicy {
    /// Execute transfers roughly in submission order.
    Fifo,
    /// Execute transfers in a seeded pseudo-random order.
    Random { seed: u64 },
}

impl Default for SchedulePolicy {
    fn default() -> Self {
        SchedulePolicy::Fifo
    }
}

/// Type-erased endpoint of a transfer.
#[derive(Debug, Clone, Copy)]
pub struct RawRef {
    pub owner: RankId,
    pub segment: SegId,
    pub offset: usize,
    pub span: usize,
}

pub enum JobKind {
    PutF64(Vec<f64>),
    PutI32(Vec<i32>),
    Get { src: RawRef },
}

pub(crate) struct Job {
    pub dst: RawRef,
    pub kind: JobKind,
    /// Data-flow pair: (rank the payload leaves, rank it arrives at).
    pub flow: (RankId, RankId),
    pub bytes: u64,
    pub op: Arc<OpState>,
}

pub(crate) struct TransferEngine {
    queue: Mutex<VecDeque<Job>>,
    cv: Condvar,
    closed: AtomicBool,
    picker: Mutex<Option<ChaCha8Rng>>,
}

pub(crate) const WORKER_THREADS: usize = 2;

impl TransferEngine {
    pub(crate) fn new(policy: SchedulePolicy) -> Self {
        let picker = match policy {
            SchedulePolicy::Fifo => None,
            SchedulePolicy::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        Self {
            queue: Mutex::new(VecDeque::new()),
            cv: Condvar::new(),
            closed: AtomicBool::new(false),
            picker: Mutex::new(picker),
        }
    }

    pub(crate) fn submit(&self, job: Job) {
        self.queue.lock().push_back(job);
        self.cv.notify_one();
    }

    /// Stop workers once the queue drains.
    pub(crate) fn shutdown(&self) {
        self.closed.store(true, Ordering::SeqCst);
        self.cv.notify_all();
    }

    pub(crate) fn worker_loop(&self, world: &World) {
        loop {
            let job = {
                let mut q = self.queue.lock();
                loop {
                    if let Some(job) = self.pick(&mut q) {
                        break job;
                    }
                    if self.closed.load(Ordering::SeqCst) {
                        return;
                    }
                    self.cv.wait(&mut q);
                }
            };
            execute(world, job);
        }
    }

    fn pick(&self, q: &mut VecDeque<Job>) -> Option<Job> {
        if q.is_empty() {
            return None;
        }
        let idx = match self.picker.lock().as_mut() {
            Some(rng) => rng.gen_range(0..q.len()),
            None => 0,
        };
        q.remove(idx)
    }
}

fn execute(world: &World, job: Job) {
    match &job.kind {
        JobKind::PutF64(data) => {
            write_into(world, &job.dst, data);
        }
        JobKind::PutI32(data) => {
            write_into(world, &job.dst, data);
        }
        JobKind::Get { src } => {
            // Read the source fully before touching the destination so the
            // two segment locks are never held at once.
            match world.store_of(src.owner, src.segment).kind() {
                ElemKind::F64 => {
                    let data = read_from::<f64>(world, src);
                    write_into(world, &job.dst, &data);
                }
                ElemKind::I32 => {
                    let data = read_from::<i32>(world, src);
                    write_into(world, &job.dst, &data);
                }
            }
        }
    }
    world.account_transfer(job.flow.0, job.flow.1, job.bytes);
    job.op.fulfill();
}

fn read_from<T: crate::pgas::Elem>(world: &World, src: &RawRef) -> Vec<T> {
    let store = world.store_of(src.owner, src.segment);
    let lock = T::open(&store).expect("kind checked at submit");
    let guard = lock.read();
    guard[src.offset..src.offset + src.span].to_vec()
}

fn write_into<T: crate::pgas::Elem>(world: &World, dst: &RawRef, data: &[T]) {
    let store = world.store_of(dst.owner, dst.segment);
    let lock = T::open(&store).expect("kind checked at submit");
    let mut guard = lock.write();
    guard[dst.offset..dst.offset + dst.span].copy_from_slice(data);
}


impl RawRef {
    pub(crate) fn of<T: crate::pgas::Elem>(r: &crate::pgas::GlobalRef<T>) -> Self {
        Self {
            owner: r.owner(),
            segment: r.segment(),
            offset: r.offset(),
            span: r.span(),
        }
    }
}
