use crate::codec::{self, Reader, Writer};
use crate::error::{Error, Result};

const TAG: &[u8; 4] = b"SHbv";
const VERSION: u32 = 1;

/// One sampled position is kept for every this many 1-bits.
pub const SELECT_SAMPLE_RATE: usize = 4096;

/// Appends bits one at a time and freezes into a [`BitVector`].
#[derive(Debug, Default, Clone)]
pub struct BitVectorBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitVectorBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder of `len` zero bits.
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    /// Appends `count` zero bits.
    pub fn push_zeros(&mut self, count: usize) {
        self.len += count;
        self.words.resize(self.len.div_ceil(64), 0);
    }

    pub fn set(&mut self, pos: usize) {
        assert!(pos < self.len, "bit {pos} out of range {}", self.len);
        self.words[pos / 64] |= 1 << (pos % 64);
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn build(self) -> BitVector {
        BitVector::from_words(self.words, self.len)
    }
}

/// Immutable bit vector with `select1` support.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
    ones: usize,
    /// `samples[k]` is the position of the 1-bit of rank `k * SELECT_SAMPLE_RATE`.
    samples: Vec<u64>,
}

#[inline]
fn select_in_word(mut w: u64, mut rank: u32) -> u32 {
    while rank > 0 {
        w &= w - 1;
        rank -= 1;
    }
    w.trailing_zeros()
}

impl BitVector {
    fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert_eq!(words.len(), len.div_ceil(64));
        let mut samples = Vec::new();
        let mut ones = 0usize;
        for (wi, &w) in words.iter().enumerate() {
            let c = w.count_ones() as usize;
            // next sampled rank falls inside this word
            let next = samples.len() * SELECT_SAMPLE_RATE;
            if next < ones + c {
                let pos = wi * 64 + select_in_word(w, (next - ones) as u32) as usize;
                samples.push(pos as u64);
            }
            ones += c;
        }
        Self {
            words,
            len,
            ones,
            samples,
        }
    }

    /// Builds from booleans.
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut b = BitVectorBuilder::new();
        for bit in bits {
            b.push(bit);
        }
        b.build()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len);
        self.words[pos / 64] >> (pos % 64) & 1 == 1
    }

    /// Position of the 1-bit with `rank` 1-bits before it.
    pub fn select1(&self, rank: usize) -> Result<usize> {
        if rank >= self.ones {
            return Err(Error::RankOutOfRange {
                rank,
                popcount: self.ones,
            });
        }
        Ok(self.select1_unchecked(rank))
    }

    #[inline]
    pub(crate) fn select1_unchecked(&self, rank: usize) -> usize {
        let block = rank / SELECT_SAMPLE_RATE;
        let start = self.samples[block] as usize;
        let mut remaining = (rank - block * SELECT_SAMPLE_RATE) as u32;
        let mut wi = start / 64;
        let mut w = self.words[wi] & (u64::MAX << (start % 64));
        loop {
            let c = w.count_ones();
            if remaining < c {
                return wi * 64 + select_in_word(w, remaining) as usize;
            }
            remaining -= c;
            wi += 1;
            w = self.words[wi];
        }
    }

    /// Bits used by the select samples.
    pub fn index_bits(&self) -> u64 {
        64 * self.samples.len() as u64
    }

    pub fn serialized_bits(&self) -> u64 {
        8 * (codec::HEADER_BYTES as u64 + 8)
            + codec::words_bits(self.words.len())
            + codec::words_bits(self.samples.len())
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.header(TAG, VERSION);
        w.u64(self.len as u64);
        w.words(&self.words);
        w.words(&self.samples);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        r.header(TAG, VERSION)?;
        let len = r.usize()?;
        let words = r.words()?;
        let samples = r.words()?;
        if words.len() != len.div_ceil(64) {
            return Err(Error::Malformed("bit vector length".into()));
        }
        if len % 64 != 0 && words.last().is_some_and(|&w| w >> (len % 64) != 0) {
            return Err(Error::Malformed("bits set past the end".into()));
        }
        let bv = Self::from_words(words, len);
        if bv.samples != samples {
            return Err(Error::Malformed("select samples".into()));
        }
        Ok(bv)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.into_inner()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let bv = Self::read(&mut r)?;
        r.finish()?;
        Ok(bv)
    }
}
