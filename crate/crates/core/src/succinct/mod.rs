//! Static succinct structures: a bit vector with `select1`, fixed-width
//! packed arrays, Elias-Fano coded monotone sequences and Rice coded
//! sequences.
//!
//! All structures are immutable once built and serialize to a little-endian
//! blob that starts with a 4-byte tag and a `u32` version. See
//! `docs/FORMAT.md` for the byte layouts.

mod bit_vector;
mod compact;
mod elias_fano;
mod golomb_rice;

pub use bit_vector::{BitVector, BitVectorBuilder, SELECT_SAMPLE_RATE};
pub use compact::CompactArray;
pub use elias_fano::EliasFano;
pub use golomb_rice::GolombRice;

/// Smallest number of bits that can hold `v`.
#[inline]
pub fn bit_width(v: u64) -> u32 {
    64 - v.leading_zeros()
}
