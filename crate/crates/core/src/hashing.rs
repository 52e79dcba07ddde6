//! Seeded key hashing and the values derived from it.
//!
//! Every key is hashed exactly once into a 128-bit [`MasterHash`]. Bucket,
//! class, candidate cells and retrieval positions are all derived from it by
//! cheap remixing, so construction and queries see identical values.
//!
//! Bit usage:
//! - `hi` drives the bucket index (fixed-point range reduction).
//! - `lo` drives the class (threshold comparison).
//! - cells and retrieval positions remix both halves together with a seed.

use xxhash_rust::xxh3::xxh3_128_with_seed;

/// 128-bit fingerprint of a key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MasterHash {
    pub hi: u64,
    pub lo: u64,
}

impl MasterHash {
    pub const fn new(hi: u64, lo: u64) -> Self {
        Self { hi, lo }
    }
}

/// Seed shared by every hash evaluation of one function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GlobalSeed(pub u64);

/// Number of candidate cells per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KeyClass {
    C2,
    C4,
    C8,
}

impl KeyClass {
    pub const ALL: [KeyClass; 3] = [KeyClass::C2, KeyClass::C4, KeyClass::C8];

    #[inline]
    pub const fn degree(self) -> u32 {
        match self {
            KeyClass::C2 => 2,
            KeyClass::C4 => 4,
            KeyClass::C8 => 8,
        }
    }

    /// Bits needed to store a function index of this class.
    #[inline]
    pub const fn bits(self) -> u32 {
        match self {
            KeyClass::C2 => 1,
            KeyClass::C4 => 2,
            KeyClass::C8 => 3,
        }
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.bits() as usize - 1
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Murmur3 finalizer. Bijective on `u64`.
#[inline]
pub(crate) const fn fmix64(mut x: u64) -> u64 {
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
    x ^= x >> 33;
    x = x.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    x ^= x >> 33;
    x
}

/// Maps a uniform 64-bit value onto `[0, n)` by fixed-point multiplication.
#[inline]
pub const fn fastrange(x: u64, n: u64) -> u64 {
    ((x as u128 * n as u128) >> 64) as u64
}

/// Hashes `key` with the given seed.
pub fn master_hash(key: &[u8], seed: GlobalSeed) -> MasterHash {
    let h = xxh3_128_with_seed(key, seed.0);
    MasterHash {
        hi: (h >> 64) as u64,
        lo: h as u64,
    }
}

/// Bucket of `h` among `num_buckets` buckets. Uses `hi` only.
#[inline]
pub fn bucket_of(h: MasterHash, num_buckets: u64) -> u64 {
    fastrange(h.hi, num_buckets)
}

/// Fixed-point class thresholds for fractions `p1` (two choices) and `p2`
/// (four choices); the rest gets eight choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassThresholds {
    c2_below: u64,
    c4_below: u64,
    all_c2: bool,
    c8_empty: bool,
}

fn fraction_to_fixed(p: f64) -> (u64, bool) {
    // returns (threshold, saturated) where saturated means "every value is below"
    if p <= 0.0 {
        (0, false)
    } else if p >= 1.0 {
        (u64::MAX, true)
    } else {
        ((p * 18_446_744_073_709_551_616.0) as u64, false)
    }
}

impl ClassThresholds {
    pub fn new(p1: f64, p2: f64) -> Self {
        let (c2_below, all_c2) = fraction_to_fixed(p1);
        let (c4_below, c8_empty) = fraction_to_fixed(p1 + p2);
        Self {
            c2_below,
            c4_below,
            all_c2,
            c8_empty,
        }
    }

    /// Class of `h`. Uses `lo` only.
    #[inline]
    pub fn class_of(&self, h: MasterHash) -> KeyClass {
        if self.all_c2 || h.lo < self.c2_below {
            KeyClass::C2
        } else if self.c8_empty || h.lo < self.c4_below {
            KeyClass::C4
        } else {
            KeyClass::C8
        }
    }
}

/// Class of `h` for fractions `p1`, `p2`.
pub fn class_of(h: MasterHash, p1: f64, p2: f64) -> KeyClass {
    ClassThresholds::new(p1, p2).class_of(h)
}

/// Candidate cell `fn_index` of `h` in a table of `m` cells built with
/// `bucket_seed`.
#[inline]
pub fn cell_of(h: MasterHash, bucket_seed: u64, fn_index: u32, m: u64) -> u64 {
    let salt = (bucket_seed << 3 | fn_index as u64).wrapping_add(1);
    let x = fmix64(h.lo.wrapping_add(salt.wrapping_mul(GOLDEN)));
    fastrange(fmix64(x ^ h.hi.rotate_left(23)), m)
}

/// Independent 64-bit stream for retrieval structures.
#[inline]
pub(crate) fn retrieval_mix(h: MasterHash, seed: u64) -> u64 {
    let x = fmix64(
        h.hi ^ seed
            .wrapping_mul(GOLDEN)
            .wrapping_add(0x632b_e59b_d9b4_e019),
    );
    fmix64(x ^ h.lo.rotate_left(41))
}
