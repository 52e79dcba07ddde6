use crate::codec::{self, Reader, Writer};
use crate::error::{Error, Result};

const TAG: &[u8; 4] = b"SHca";
const VERSION: u32 = 1;

/// Array of `len` unsigned integers of `width` bits each, packed into words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CompactArray {
    width: u32,
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn mask(width: u32) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl CompactArray {
    pub fn new(width: u32, len: usize) -> Self {
        assert!(width <= 64, "width {width} exceeds 64");
        let bits = width as usize * len;
        Self {
            width,
            len,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    /// Packs `values`; fails if one does not fit in `width` bits.
    pub fn from_values(width: u32, values: &[u64]) -> Result<Self> {
        let mut a = Self::new(width, values.len());
        for (i, &v) in values.iter().enumerate() {
            if v & !mask(width) != 0 {
                return Err(Error::InvalidValue(format!(
                    "{v} does not fit in {width} bits"
                )));
            }
            a.set(i, v);
        }
        Ok(a)
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Stores the low `width` bits of `value` at `index`.
    pub fn set(&mut self, index: usize, value: u64) {
        assert!(index < self.len);
        if self.width == 0 {
            return;
        }
        let value = value & mask(self.width);
        let bit = index * self.width as usize;
        let (word, off) = (bit / 64, (bit % 64) as u32);
        self.words[word] &= !(mask(self.width) << off);
        self.words[word] |= value << off;
        if off + self.width > 64 {
            let spill = off + self.width - 64;
            self.words[word + 1] &= !mask(spill);
            self.words[word + 1] |= value >> (64 - off);
        }
    }

    #[inline]
    pub fn get(&self, index: usize) -> u64 {
        debug_assert!(index < self.len);
        if self.width == 0 {
            return 0;
        }
        let bit = index * self.width as usize;
        let (word, off) = (bit / 64, (bit % 64) as u32);
        let mut v = self.words[word] >> off;
        if off + self.width > 64 {
            v |= self.words[word + 1] << (64 - off);
        }
        v & mask(self.width)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn serialized_bits(&self) -> u64 {
        8 * (codec::HEADER_BYTES as u64 + 4 + 8) + codec::words_bits(self.words.len())
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.header(TAG, VERSION);
        w.u32(self.width);
        w.u64(self.len as u64);
        w.words(&self.words);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        r.header(TAG, VERSION)?;
        let width = r.u32()?;
        let len = r.usize()?;
        if width > 64 {
            return Err(Error::Malformed(format!("width {width}")));
        }
        let words = r.words()?;
        let needed = (width as u128 * len as u128).div_ceil(64);
        if words.len() as u128 != needed {
            return Err(Error::Malformed("packed array length".into()));
        }
        Ok(Self { width, len, words })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.into_inner()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let a = Self::read(&mut r)?;
        r.finish()?;
        Ok(a)
    }
}
