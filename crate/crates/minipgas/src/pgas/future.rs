//! Completion futures for one-sided transfers.
//!
//! A [`CompletionFuture`] becomes ready exactly once and never reverts to
//! pending. Futures are waitable only by the rank that initiated the
//! operation; the handle is deliberately `!Send` so it cannot migrate to
//! another rank's thread.

use std::marker::PhantomData;
use std::sync::Arc;

use parking_lot::{Condvar, Mutex};

/// Observable state of a [`CompletionFuture`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FutureState {
    Pending,
    Ready,
}

/// Shared completion flag between a future handle and the transfer engine.
pub(crate) struct OpState {
    done: Mutex<bool>,
    cv: Condvar,
}

impl OpState {
    pub(crate) fn new() -> Arc<Self> {
        Arc::new(Self {
            done: Mutex::new(false),
            cv: Condvar::new(),
        })
    }

    pub(crate) fn fulfill(&self) {
        let mut g = self.done.lock();
        *g = true;
        self.cv.notify_all();
    }

    fn is_ready(&self) -> bool {
        *self.done.lock()
    }

    fn wait(&self) {
        let mut g = self.done.lock();
        while !*g {
            self.cv.wait(&mut g);
        }
    }
}

enum Inner {
    Ready,
    Op(Arc<OpState>),
    All(Vec<CompletionFuture>),
}

/// Handle to an asynchronous one-sided operation.
pub struct CompletionFuture {
    inner: Inner,
    // Futures must stay on the initiating rank's thread.
    _not_send: PhantomData<*const ()>,
}

impl CompletionFuture {
    /// A trivially ready future (the conjunction identity).
    pub fn ready() -> Self {
        Self {
            inner: Inner::Ready,
            _not_send: PhantomData,
        }
    }

    pub(crate) fn from_op(op: Arc<OpState>) -> Self {
        Self {
            inner: Inner::Op(op),
            _not_send: PhantomData,
        }
    }

    /// Current state; once [`FutureState::Ready`] it never reverts.
    pub fn state(&self) -> FutureState {
        if self.is_ready() {
            FutureState::Ready
        } else {
            FutureState::Pending
        }
    }

    pub fn is_ready(&self) -> bool {
        match &self.inner {
            Inner::Ready => true,
            Inner::Op(op) => op.is_ready(),
            Inner::All(children) => children.iter().all(|c| c.is_ready()),
        }
    }

    /// Block until the operation (and, for conjoined futures, every child)
    /// has completed. Idempotent: waiting on a ready future returns
    /// immediately.
    pub fn wait(&self) {
        match &self.inner {
            Inner::Ready => {}
            Inner::Op(op) => op.wait(),
            Inner::All(children) => {
                for c in children {
                    c.wait();
                }
            }
        }
    }
}

impl std::fmt::Debug for CompletionFuture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("CompletionFuture").field(&self.state()).finish()
    }
}

/// Conjoin futures: the result is ready iff every input is ready.
///
/// An empty input yields a trivially ready future.
pub fn when_all<I>(futures: I) -> CompletionFuture
where
    I: IntoIterator<Item = CompletionFuture>,
{
    let children: Vec<_> = futures.into_iter().collect();
    if children.is_empty() {
        return CompletionFuture::ready();
    }
    CompletionFuture {
        inner: Inner::All(children),
        _not_send: PhantomData,
    }
}
