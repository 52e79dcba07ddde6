//! Static retrieval: maps each key of a fixed set to an `r`-bit value,
//! `r` in 1..=3.
//!
//! Every key is assigned a start slot and a `band_width`-bit coefficient
//! pattern with the lowest bit set. The stored value is the XOR of the
//! solution rows selected by the pattern, one bit plane per value bit. The
//! banded system over GF(2) is solved by incremental Gaussian elimination in
//! start order followed by back substitution. Keys outside the set get some
//! deterministic value.

use crate::codec::{self, Reader, Writer};
use crate::error::{Error, Result};
use crate::hashing::{fastrange, fmix64, retrieval_mix, MasterHash};

const TAG: &[u8; 4] = b"SHrs";
const VERSION: u32 = 1;

/// Construction parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrievalConfig {
    /// Relative slack: `num_slots = ceil(n * (1 + epsilon))`.
    pub epsilon: f64,
    /// Width of the coefficient band, at most 64.
    pub band_width: u32,
    /// Seeds tried before giving up.
    pub max_seed_retries: u32,
    /// First seed tried.
    pub seed: u64,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.10,
            band_width: 64,
            max_seed_retries: 16,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RetrievalStore {
    bits: u32,
    num_slots: u64,
    seed: u64,
    band_width: u32,
    /// Block-interleaved bit planes: word `block * bits + plane` holds slots
    /// `64 * block .. 64 * block + 64` of that plane. One zero block of
    /// padding at the end.
    words: Vec<u64>,
}

#[inline]
fn band_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Start slot and coefficient pattern of `h`.
#[inline]
fn row_of(h: MasterHash, seed: u64, num_slots: u64, band_width: u32) -> (u64, u64) {
    let x = retrieval_mix(h, seed);
    let start = fastrange(x, num_slots - band_width as u64 + 1);
    let coeff = (fmix64(x ^ 0xd6e8_feb8_6659_fd93) & band_mask(band_width)) | 1;
    (start, coeff)
}

impl RetrievalStore {
    /// Builds a store answering `value` for every `(hash, value)` pair.
    pub fn build(pairs: &[(MasterHash, u8)], bits: u32, config: &RetrievalConfig) -> Result<Self> {
        if !(1..=3).contains(&bits) {
            return Err(Error::InvalidValue(format!("{bits} bits per value")));
        }
        if !(1..=64).contains(&config.band_width) {
            return Err(Error::InvalidValue(format!(
                "band width {}",
                config.band_width
            )));
        }
        if !(config.epsilon.is_finite() && config.epsilon >= 0.0) {
            return Err(Error::InvalidValue(format!("epsilon {}", config.epsilon)));
        }
        if let Some(&(_, v)) = pairs.iter().find(|&&(_, v)| v >> bits != 0) {
            return Err(Error::InvalidValue(format!(
                "value {v} does not fit in {bits} bits"
            )));
        }
        let n = pairs.len();
        let num_slots = (n as f64 * (1.0 + config.epsilon)).ceil() as u64;
        let num_slots = num_slots.max(n as u64);
        let band_width = config.band_width.min(num_slots.max(1) as u32);
        let blocks = num_slots.div_ceil(64) as usize + 1;

        let mut store = Self {
            bits,
            num_slots,
            seed: config.seed,
            band_width,
            words: vec![0; blocks * bits as usize],
        };
        if n == 0 {
            return Ok(store);
        }

        let mut rows = vec![0u64; num_slots as usize];
        let mut results = vec![0u8; num_slots as usize];
        let mut order: Vec<(u64, u64, MasterHash, u8)> = Vec::with_capacity(n);
        for attempt in 0..config.max_seed_retries {
            let seed = config.seed.wrapping_add(attempt as u64);
            order.clear();
            order.extend(pairs.iter().map(|&(h, v)| {
                let (start, coeff) = row_of(h, seed, num_slots, band_width);
                (start, coeff, h, v)
            }));
            order.sort_unstable_by_key(|&(start, _, h, _)| (start, h));
            if order.windows(2).any(|w| w[0].2 == w[1].2) {
                return Err(Error::DuplicateKey);
            }
            rows.fill(0);
            results.fill(0);
            let solved = order
                .iter()
                .all(|&(start, coeff, _, v)| eliminate(&mut rows, &mut results, start, coeff, v));
            if solved {
                store.seed = seed;
                store.back_substitute(&rows, &results);
                return Ok(store);
            }
        }
        Err(Error::RetrievalFailed {
            attempts: config.max_seed_retries,
        })
    }

    fn back_substitute(&mut self, rows: &[u64], results: &[u8]) {
        for i in (0..rows.len()).rev() {
            let coeff = rows[i];
            if coeff == 0 {
                continue;
            }
            let (block, off) = (i / 64, i % 64);
            for plane in 0..self.bits {
                // bit i of the plane is still zero, so the pivot drops out
                let parity = (coeff & self.window(plane, i as u64)).count_ones() & 1;
                let bit = (results[i] >> plane) as u32 & 1 ^ parity;
                self.words[block * self.bits as usize + plane as usize] |= (bit as u64) << off;
            }
        }
    }

    #[inline]
    fn window(&self, plane: u32, start: u64) -> u64 {
        let block = (start / 64) as usize;
        let off = start % 64;
        let stride = self.bits as usize;
        let lo = self.words[block * stride + plane as usize] >> off;
        if off == 0 {
            lo
        } else {
            lo | self.words[(block + 1) * stride + plane as usize] << (64 - off)
        }
    }

    /// Stored value for members of the construction set, some fixed value
    /// below `2^bits` otherwise.
    #[inline]
    pub fn query(&self, h: MasterHash) -> u8 {
        if self.num_slots == 0 {
            return 0;
        }
        let (start, coeff) = row_of(h, self.seed, self.num_slots, self.band_width);
        let mut value = 0u8;
        for plane in 0..self.bits {
            let parity = (coeff & self.window(plane, start)).count_ones() & 1;
            value |= (parity as u8) << plane;
        }
        value
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn num_slots(&self) -> u64 {
        self.num_slots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn band_width(&self) -> u32 {
        self.band_width
    }

    /// Exact size of [`RetrievalStore::to_bytes`] in bits.
    pub fn serialized_bits(&self) -> u64 {
        8 * (codec::HEADER_BYTES as u64 + 4 + 8 + 8 + 4) + codec::words_bits(self.words.len())
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.header(TAG, VERSION);
        w.u32(self.bits);
        w.u64(self.num_slots);
        w.u64(self.seed);
        w.u32(self.band_width);
        w.words(&self.words);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        r.header(TAG, VERSION)?;
        let bits = r.u32()?;
        let num_slots = r.u64()?;
        let seed = r.u64()?;
        let band_width = r.u32()?;
        let words = r.words()?;
        if !(1..=3).contains(&bits) || !(1..=64).contains(&band_width) {
            return Err(Error::Malformed("retrieval parameters".into()));
        }
        if num_slots > 0 && num_slots < band_width as u64 {
            return Err(Error::Malformed("band wider than table".into()));
        }
        let blocks = num_slots.div_ceil(64) as u128 + 1;
        if words.len() as u128 != blocks * bits as u128 {
            return Err(Error::Malformed("retrieval solution length".into()));
        }
        Ok(Self {
            bits,
            num_slots,
            seed,
            band_width,
            words,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.into_inner()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let s = Self::read(&mut r)?;
        r.finish()?;
        Ok(s)
    }
}

/// Adds one equation to the echelon form. Returns false on an inconsistent
/// equation.
#[inline]
fn eliminate(
    rows: &mut [u64],
    results: &mut [u8],
    mut start: u64,
    mut coeff: u64,
    mut value: u8,
) -> bool {
    loop {
        let i = start as usize;
        let existing = rows[i];
        if existing == 0 {
            rows[i] = coeff;
            results[i] = value;
            return true;
        }
        coeff ^= existing;
        value ^= results[i];
        if coeff == 0 {
            return value == 0;
        }
        let shift = coeff.trailing_zeros();
        start += shift as u64;
        coeff >>= shift;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pairs(seed: u64, n: usize, bits: u32) -> Vec<(MasterHash, u8)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                (
                    MasterHash::new(rng.gen(), rng.gen()),
                    rng.gen_range(0..1u8 << bits),
                )
            })
            .collect()
    }

    #[test]
    fn empty_store_answers_something() {
        let s = RetrievalStore::build(&[], 3, &RetrievalConfig::default()).unwrap();
        assert_eq!(s.num_slots(), 0);
        let v = s.query(MasterHash::new(1, 2));
        assert!(v < 8);
        assert!(s.serialized_bits() < 1024);
    }

    #[test]
    fn single_pair() {
        let h = MasterHash::new(0xdead, 0xbeef);
        let s = RetrievalStore::build(&[(h, 5)], 3, &RetrievalConfig::default()).unwrap();
        assert_eq!(s.query(h), 5);
    }

    #[test]
    fn tiny_sets_always_solve() {
        for n in 1..80 {
            for seed in 0..20 {
                let pairs = random_pairs(1000 * n as u64 + seed, n, 2);
                let s = RetrievalStore::build(&pairs, 2, &RetrievalConfig::default()).unwrap();
                for &(h, v) in &pairs {
                    assert_eq!(s.query(h), v);
                }
            }
        }
    }

    #[test]
    fn hundred_thousand_pairs_two_bits() {
        let pairs = random_pairs(7, 100_000, 2);
        let s = RetrievalStore::build(&pairs, 2, &RetrievalConfig::default()).unwrap();
        assert!(pairs.iter().all(|&(h, v)| s.query(h) == v));
        // r * n * (1 + eps) plus framing and one padding block per plane
        let bound = 2.0 * 100_000.0 * 1.10 + 2.0 * 128.0 + 512.0;
        assert!(
            (s.serialized_bits() as f64) <= bound,
            "{}",
            s.serialized_bits()
        );
    }

    #[test]
    fn unseen_keys_are_deterministic_and_in_range() {
        let pairs = random_pairs(8, 5000, 3);
        let s = RetrievalStore::build(&pairs, 3, &RetrievalConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let h = MasterHash::new(rng.gen(), rng.gen());
            let v = s.query(h);
            assert!(v < 8);
            assert_eq!(v, s.query(h));
        }
    }

    #[test]
    fn duplicate_hash_rejected() {
        let h = MasterHash::new(1, 1);
        let err = RetrievalStore::build(&[(h, 0), (h, 1)], 1, &RetrievalConfig::default());
        assert_eq!(err, Err(Error::DuplicateKey));
    }

    #[test]
    fn out_of_range_value_rejected() {
        let err = RetrievalStore::build(
            &[(MasterHash::new(1, 1), 2)],
            1,
            &RetrievalConfig::default(),
        );
        assert!(matches!(err, Err(Error::InvalidValue(_))));
    }

    #[test]
    fn zero_slack_reports_failure() {
        let config = RetrievalConfig {
            epsilon: 0.0,
            max_seed_retries: 2,
            ..Default::default()
        };
        let pairs = random_pairs(10, 20_000, 1);
        assert_eq!(
            RetrievalStore::build(&pairs, 1, &config),
            Err(Error::RetrievalFailed { attempts: 2 })
        );
    }

    #[test]
    fn serialized_store_answers_identically() {
        let pairs = random_pairs(12, 20_000, 3);
        let s = RetrievalStore::build(&pairs, 3, &RetrievalConfig::default()).unwrap();
        let bytes = s.to_bytes();
        assert_eq!(bytes.len() as u64 * 8, s.serialized_bits());
        let t = RetrievalStore::from_bytes(&bytes).unwrap();
        assert!(pairs.iter().all(|&(h, v)| t.query(h) == v));
        assert!(RetrievalStore::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn query_back(seed in any::<u64>(), n in 0usize..300, bits in 1u32..=3) {
            let pairs = random_pairs(seed, n, bits);
            let s = RetrievalStore::build(&pairs, bits, &RetrievalConfig::default()).unwrap();
            for &(h, v) in &pairs {
                prop_assert_eq!(s.query(h), v);
            }
        }
    }
}
