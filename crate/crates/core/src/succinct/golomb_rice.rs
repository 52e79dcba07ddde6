use super::{bit_width, BitVector, BitVectorBuilder, CompactArray};
use crate::codec::{self, Reader, Writer};
use crate::error::{Error, Result};

const TAG: &[u8; 4] = b"SHgr";
const VERSION: u32 = 1;

/// Rice coded sequence with random access.
///
/// Each value `x` is stored as the quotient `x >> k_log` in unary (that many
/// zeros followed by a one) and the remainder in `k_log` binary bits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GolombRice {
    k_log: u32,
    len: usize,
    unary: BitVector,
    remainders: CompactArray,
}

impl GolombRice {
    pub fn new(values: &[u64], k_log: u32) -> Result<Self> {
        if k_log > 63 {
            return Err(Error::InvalidValue(format!("Rice parameter 2^{k_log}")));
        }
        let mut unary = BitVectorBuilder::new();
        let mut remainders = CompactArray::new(k_log, values.len());
        for (i, &x) in values.iter().enumerate() {
            unary.push_zeros((x >> k_log) as usize);
            unary.push(true);
            remainders.set(i, x);
        }
        Ok(Self {
            k_log,
            len: values.len(),
            unary: unary.build(),
            remainders,
        })
    }

    /// Rice parameter suited to geometric data with the given mean:
    /// `max(0, floor(log2(mean + 1)))`.
    pub fn parameter_for_mean(mean: f64) -> u32 {
        if !(mean.is_finite() && mean > 0.0) {
            return 0;
        }
        bit_width((mean + 1.0) as u64).saturating_sub(1)
    }

    /// Encodes with [`GolombRice::parameter_for_mean`] of the values.
    pub fn with_mean_parameter(values: &[u64]) -> Result<Self> {
        let mean = if values.is_empty() {
            0.0
        } else {
            values.iter().map(|&v| v as f64).sum::<f64>() / values.len() as f64
        };
        Self::new(values, Self::parameter_for_mean(mean))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn k_log(&self) -> u32 {
        self.k_log
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
        let end = self.unary.select1_unchecked(index);
        let start = if index == 0 {
            0
        } else {
            self.unary.select1_unchecked(index - 1) + 1
        };
        ((end - start) as u64) << self.k_log | self.remainders.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(|i| self.get_unchecked(i))
    }

    /// Unary plus remainder bits, excluding the select index and framing.
    pub fn data_bits(&self) -> u64 {
        self.unary.len() as u64 + self.len as u64 * self.k_log as u64
    }

    pub fn serialized_bits(&self) -> u64 {
        8 * (codec::HEADER_BYTES as u64 + 4 + 8)
            + self.unary.serialized_bits()
            + self.remainders.serialized_bits()
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.header(TAG, VERSION);
        w.u32(self.k_log);
        w.u64(self.len as u64);
        self.unary.write(w);
        self.remainders.write(w);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        r.header(TAG, VERSION)?;
        let k_log = r.u32()?;
        let len = r.usize()?;
        let unary = BitVector::read(r)?;
        let remainders = CompactArray::read(r)?;
        if unary.count_ones() != len || remainders.len() != len || remainders.width() != k_log {
            return Err(Error::Malformed("Rice parts disagree".into()));
        }
        Ok(Self {
            k_log,
            len,
            unary,
            remainders,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.into_inner()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let gr = Self::read(&mut r)?;
        r.finish()?;
        Ok(gr)
    }
}
