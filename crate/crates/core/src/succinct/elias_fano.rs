use super::{bit_width, BitVector, BitVectorBuilder, CompactArray};
use crate::codec::{self, Reader, Writer};
use crate::error::{Error, Result};

const TAG: &[u8; 4] = b"SHef";
const VERSION: u32 = 1;

/// Elias-Fano coded non-decreasing sequence.
///
/// Value `v` at position `i` is split into `v >> low_width`, stored as a
/// 1-bit at position `i + (v >> low_width)` of `upper`, and the low bits,
/// stored in `lower`. With `low_width = floor(log2(U / N))` the total is at
/// most `2N + N * ceil(log2(U / N))` bits plus the select samples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EliasFano {
    upper: BitVector,
    lower: CompactArray,
    len: usize,
    /// One past the largest value, 0 for an empty sequence.
    universe: u64,
    low_width: u32,
}

impl EliasFano {
    /// Encodes `values`, which must be non-decreasing.
    pub fn new(values: &[u64]) -> Result<Self> {
        if let Some(position) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::NotMonotone {
                position: position + 1,
            });
        }
        let len = values.len();
        let universe = values.last().map_or(0, |&v| v.saturating_add(1));
        let low_width = if len == 0 || universe <= len as u64 {
            0
        } else {
            bit_width(universe / len as u64) - 1
        };
        let mut lower = CompactArray::new(low_width, len);
        let high_max = values.last().map_or(0, |&v| v >> low_width) as usize;
        let mut upper = BitVectorBuilder::zeros(if len == 0 { 0 } else { len + high_max + 1 });
        for (i, &v) in values.iter().enumerate() {
            lower.set(i, v);
            upper.set(i + (v >> low_width) as usize);
        }
        Ok(Self {
            upper: upper.build(),
            lower,
            len,
            universe,
            low_width,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// One past the largest value (0 when empty).
    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn low_width(&self) -> u32 {
        self.low_width
    }

    pub fn get(&self, index: usize) -> Result<u64> {
        if index >= self.len {
            return Err(Error::IndexOutOfBounds {
                index,
                len: self.len,
            });
        }
        Ok(self.get_unchecked(index))
    }

    #[inline]
    pub(crate) fn get_unchecked(&self, index: usize) -> u64 {
        let high = (self.upper.select1_unchecked(index) - index) as u64;
        high << self.low_width | self.lower.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(|i| self.get_unchecked(i))
    }

    /// Bits of the two coded arrays, excluding the select index and framing.
    pub fn data_bits(&self) -> u64 {
        self.upper.len() as u64 + self.len as u64 * self.low_width as u64
    }

    /// Bits of the select index.
    pub fn index_bits(&self) -> u64 {
        self.upper.index_bits()
    }

    pub fn serialized_bits(&self) -> u64 {
        8 * (codec::HEADER_BYTES as u64 + 8 + 8 + 4)
            + self.upper.serialized_bits()
            + self.lower.serialized_bits()
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.header(TAG, VERSION);
        w.u64(self.len as u64);
        w.u64(self.universe);
        w.u32(self.low_width);
        self.upper.write(w);
        self.lower.write(w);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        r.header(TAG, VERSION)?;
        let len = r.usize()?;
        let universe = r.u64()?;
        let low_width = r.u32()?;
        let upper = BitVector::read(r)?;
        let lower = CompactArray::read(r)?;
        if upper.count_ones() != len || lower.len() != len || lower.width() != low_width {
            return Err(Error::Malformed("Elias-Fano parts disagree".into()));
        }
        Ok(Self {
            upper,
            lower,
            len,
            universe,
            low_width,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.into_inner()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let ef = Self::read(&mut r)?;
        r.finish()?;
        Ok(ef)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `2N + N * ceil(log2(U / N))` with `U` the largest value.
    fn textbook_bound(n: usize, max: u64) -> u64 {
        let n = n as u64;
        let ratio = (max as f64 / n as f64).max(1.0);
        2 * n + n * ratio.log2().ceil() as u64
    }

    #[test]
    fn empty_sequence() {
        let ef = EliasFano::new(&[]).unwrap();
        assert!(ef.is_empty());
        assert_eq!(ef.get(0), Err(Error::IndexOutOfBounds { index: 0, len: 0 }));
        assert_eq!(EliasFano::from_bytes(&ef.to_bytes()).unwrap(), ef);
    }

    #[test]
    fn largest_values() {
        let values = [0, u64::MAX - 1, u64::MAX, u64::MAX];
        let ef = EliasFano::new(&values).unwrap();
        assert_eq!(ef.iter().collect::<Vec<_>>(), values);
    }

    #[test]
    fn small_sequences() {
        let ef = EliasFano::new(&[0, 0, 0]).unwrap();
        assert_eq!(ef.iter().collect::<Vec<_>>(), vec![0, 0, 0]);
        let ef = EliasFano::new(&[3, 7, 20]).unwrap();
        assert_eq!(ef.get(1), Ok(7));
        let seq: Vec<u64> = (0..1000).collect();
        let ef = EliasFano::new(&seq).unwrap();
        assert_eq!(ef.get(500), Ok(500));
        assert!(ef.get(1000).is_err());
    }

    #[test]
    fn rejects_decreasing_input() {
        assert_eq!(
            EliasFano::new(&[1, 5, 4]),
            Err(Error::NotMonotone { position: 2 })
        );
    }

    #[test]
    fn space_bound_on_uniform_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut values: Vec<u64> = (0..10_000).map(|_| rng.gen_range(0..1_000_000)).collect();
        values.sort_unstable();
        let ef = EliasFano::new(&values).unwrap();
        assert_eq!(ef.iter().collect::<Vec<_>>(), values);
        let bound = textbook_bound(values.len(), *values.last().unwrap());
        // +1 for the terminating position of the upper array
        assert!(ef.data_bits() <= bound + 1, "{} > {bound}", ef.data_bits());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn roundtrip_and_space(mut values in proptest::collection::vec(0u64..1 << 40, 0..300)) {
            values.sort_unstable();
            let ef = EliasFano::new(&values).unwrap();
            prop_assert_eq!(ef.iter().collect::<Vec<_>>(), values.clone());
            if let Some(&max) = values.last() {
                prop_assert!(ef.data_bits() <= textbook_bound(values.len(), max) + 1);
            }
            let bytes = ef.to_bytes();
            prop_assert_eq!(bytes.len() as u64 * 8, ef.serialized_bits());
            prop_assert_eq!(EliasFano::from_bytes(&bytes).unwrap(), ef);
        }
    }
}
