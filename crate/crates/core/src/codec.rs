//! Little-endian byte writer/reader shared by the serializable structures.
//!
//! Every top-level blob starts with an 8-byte header: a 4-byte tag followed
//! by a little-endian `u32` format version.

use crate::error::{Error, Result};

pub(crate) const HEADER_BYTES: usize = 8;

#[derive(Default)]
pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn header(&mut self, tag: &[u8; 4], version: u32) {
        self.buf.extend_from_slice(tag);
        self.u32(version);
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    /// Length-prefixed word array.
    pub fn words(&mut self, words: &[u64]) {
        self.u64(words.len() as u64);
        self.buf.reserve(words.len() * 8);
        for w in words {
            self.buf.extend_from_slice(&w.to_le_bytes());
        }
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.buf
    }
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or(Error::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(Error::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    pub fn header(&mut self, tag: &[u8; 4], version: u32) -> Result<()> {
        let found = self.take(4)?;
        if found != tag {
            let mut expected = [0u8; 8];
            expected[..4].copy_from_slice(tag);
            expected[4..].copy_from_slice(&version.to_le_bytes());
            return Err(Error::BadMagic { expected });
        }
        let found = self.u32()?;
        if found != version {
            return Err(Error::VersionMismatch {
                found,
                supported: version,
            });
        }
        Ok(())
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    pub fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Malformed("length overflow".into()))
    }

    pub fn words(&mut self) -> Result<Vec<u64>> {
        let n = self.usize()?;
        let bytes = self.take(n.checked_mul(8).ok_or(Error::Truncated)?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub fn finish(&self) -> Result<()> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(Error::Malformed(format!(
                "{} trailing bytes",
                self.buf.len() - self.pos
            )))
        }
    }
}

/// Serialized size of a length-prefixed word array, in bits.
pub(crate) const fn words_bits(len: usize) -> u64 {
    64 * (len as u64 + 1)
}
