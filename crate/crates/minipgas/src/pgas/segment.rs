//! Shared segments, global references, and owner-side local views.

use std::fmt;
use std::marker::PhantomData;
use std::ops::{Deref, DerefMut, Range};
use std::sync::Arc;

use parking_lot::{ArcRwLockWriteGuard, RawRwLock, RwLock};

use crate::error::{Error, Result};
use crate::pgas::RankId;

/// Identifier of a shared segment. Unique per owner and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegId(pub(crate) u64);

impl fmt::Display for SegId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Element kinds a segment can hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElemKind {
    F64,
    I32,
}

impl ElemKind {
    pub fn size_bytes(self) -> usize {
        match self {
            ElemKind::F64 => 8,
            ElemKind::I32 => 4,
        }
    }
}

/// Type-erased storage of one segment. Cloning clones the handle, not the data.
///
/// Declared `pub` so the sealed [`StoreAccess`] trait may mention it, but the
/// enclosing module is private, so it stays internal to the crate.
#[derive(Clone)]
pub enum Store {
    F64(Arc<RwLock<Vec<f64>>>),
    I32(Arc<RwLock<Vec<i32>>>),
}

impl Store {
    pub(crate) fn kind(&self) -> ElemKind {
        match self {
            Store::F64(_) => ElemKind::F64,
            Store::I32(_) => ElemKind::I32,
        }
    }
}

pub(crate) struct Segment {
    pub(crate) store: Store,
}

mod sealed {
    use super::*;
    use crate::pgas::engine::JobKind;

    /// Crate-private bridge between an element type and segment storage.
    pub trait StoreAccess: Sized + 'static {
        const KIND: ElemKind;
        fn wrap(data: Vec<Self>) -> Store;
        fn open(store: &Store) -> Option<Arc<RwLock<Vec<Self>>>>;
        fn make_put(data: Vec<Self>) -> JobKind;
    }

    impl StoreAccess for f64 {
        const KIND: ElemKind = ElemKind::F64;
        fn wrap(data: Vec<Self>) -> Store {
            Store::F64(Arc::new(RwLock::new(data)))
        }
        fn open(store: &Store) -> Option<Arc<RwLock<Vec<Self>>>> {
            match store {
                Store::F64(v) => Some(v.clone()),
                Store::I32(_) => None,
            }
        }
        fn make_put(data: Vec<Self>) -> JobKind {
            JobKind::PutF64(data)
        }
    }

    impl StoreAccess for i32 {
        const KIND: ElemKind = ElemKind::I32;
        fn wrap(data: Vec<Self>) -> Store {
            Store::I32(Arc::new(RwLock::new(data)))
        }
        fn open(store: &Store) -> Option<Arc<RwLock<Vec<Self>>>> {
            match store {
                Store::I32(v) => Some(v.clone()),
                Store::F64(_) => None,
            }
        }
        fn make_put(data: Vec<Self>) -> JobKind {
            JobKind::PutI32(data)
        }
    }
}


/// Element types storable in shared segments (`f64` and `i32`).
///
/// The trait is sealed; references are typed, so transfers between segments
/// of different element kinds are rejected at compile time.
pub trait Elem:
    sealed::StoreAccess + Copy + Default + Send + Sync + PartialEq + fmt::Debug + 'static
{
}

impl Elem for f64 {}
impl Elem for i32 {}

/// Rank-qualified reference to a span of elements inside a shared segment.
///
/// A reference is a plain handle: copying or sending it moves no data, and it
/// stays valid for the lifetime of the world that allocated the segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GlobalRef<T: Elem> {
    owner: RankId,
    segment: SegId,
    offset: usize,
    span: usize,
    _elem: PhantomData<fn() -> T>,
}

impl<T: Elem> GlobalRef<T> {
    pub(crate) fn new(owner: RankId, segment: SegId, offset: usize, span: usize) -> Self {
        Self {
            owner,
            segment,
            offset,
            span,
            _elem: PhantomData,
        }
    }

    pub fn owner(&self) -> RankId {
        self.owner
    }

    pub fn segment(&self) -> SegId {
        self.segment
    }

    /// Offset of the first referenced element within the segment.
    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Number of referenced elements.
    pub fn span(&self) -> usize {
        self.span
    }

    pub fn is_empty(&self) -> bool {
        self.span == 0
    }

    pub fn kind(&self) -> ElemKind {
        <T as sealed::StoreAccess>::KIND
    }

    /// Sub-reference covering `span` elements starting `offset` elements into
    /// this reference. Fails if the requested range sticks out.
    pub fn slice(&self, offset: usize, span: usize) -> Result<Self> {
        if offset.checked_add(span).map_or(true, |end| end > self.span) {
            return Err(Error::InvalidArgument(format!(
                "sub-reference [{offset}, {}) exceeds span {}",
                offset + span,
                self.span
            )));
        }
        Ok(Self {
            owner: self.owner,
            segment: self.segment,
            offset: self.offset + offset,
            span,
            _elem: PhantomData,
        })
    }

    pub(crate) fn abs_range(&self) -> Range<usize> {
        self.offset..self.offset + self.span
    }
}

/// Direct, exclusive view of an owned segment span.
///
/// Obtained through [`crate::pgas::Rank::local_view`] by the owning rank only.
/// Holds a write lock on the whole segment: drop the view before waiting on
/// transfers that target the same segment, and before entering a barrier.
/// Access through a view is never accounted in communication statistics.
pub struct LocalView<T: Elem> {
    guard: ArcRwLockWriteGuard<RawRwLock, Vec<T>>,
    range: Range<usize>,
}

impl<T: Elem> LocalView<T> {
    pub(crate) fn new(guard: ArcRwLockWriteGuard<RawRwLock, Vec<T>>, range: Range<usize>) -> Self {
        Self { guard, range }
    }
}

impl<T: Elem> fmt::Debug for LocalView<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl<T: Elem> Deref for LocalView<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.guard[self.range.clone()]
    }
}

impl<T: Elem> DerefMut for LocalView<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.guard[self.range.clone()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_stays_inside_parent_span() {
        let r: GlobalRef<f64> = GlobalRef::new(RankId(1), SegId(7), 10, 20);
        let s = r.slice(5, 10).unwrap();
        assert_eq!(s.owner(), RankId(1));
        assert_eq!(s.offset(), 15);
        assert_eq!(s.span(), 10);
        assert_eq!(s.abs_range(), 15..25);

        assert!(r.slice(15, 6).is_err());
        assert!(r.slice(21, 0).is_err());
        let empty = r.slice(20, 0).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn element_kinds_and_sizes() {
        let rf: GlobalRef<f64> = GlobalRef::new(RankId(0), SegId(0), 0, 4);
        let ri: GlobalRef<i32> = GlobalRef::new(RankId(0), SegId(1), 0, 4);
        assert_eq!(rf.kind(), ElemKind::F64);
        assert_eq!(ri.kind(), ElemKind::I32);
        assert_eq!(ElemKind::F64.size_bytes(), 8);
        assert_eq!(ElemKind::I32.size_bytes(), 4);
    }
}
