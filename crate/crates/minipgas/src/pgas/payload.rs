//! Broadcastable values with an accounted byte size.

use crate::pgas::segment::{Elem, GlobalRef};
use crate::pgas::RankId;

/// Values that can travel through [`crate::pgas::Rank::broadcast`].
///
/// `payload_bytes` is the size accounted per message in [`crate::pgas::CommStats`].
pub trait Payload: Clone + Send + Sync + 'static {
    fn payload_bytes(&self) -> usize;
}

macro_rules! scalar_payload {
    ($($ty:ty),*) => {
        $(impl Payload for $ty {
            fn payload_bytes(&self) -> usize {
                std::mem::size_of::<$ty>()
            }
        })*
    };
}

scalar_payload!(u8, u16, u32, u64, usize, i8, i16, i32, i64, isize, f32, f64, bool);

impl Payload for RankId {
    fn payload_bytes(&self) -> usize {
        std::mem::size_of::<usize>()
    }
}

impl<T: Elem> Payload for GlobalRef<T> {
    fn payload_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
    }
}

impl<T: Payload> Payload for Vec<T> {
    fn payload_bytes(&self) -> usize {
        self.iter().map(Payload::payload_bytes).sum()
    }
}

impl<A: Payload, B: Payload> Payload for (A, B) {
    fn payload_bytes(&self) -> usize {
        self.0.payload_bytes() + self.1.payload_bytes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_follow_element_widths() {
        assert_eq!(3u64.payload_bytes(), 8);
        assert_eq!(1i32.payload_bytes(), 4);
        assert_eq!(vec![1.0f64; 5].payload_bytes(), 40);
        assert_eq!(vec![vec![1u64, 2], vec![3]].payload_bytes(), 24);
        assert_eq!((1u32, 2u64).payload_bytes(), 12);
    }
}
