use crate::codec::{self, Reader, Writer};
use crate::error::{Error, Result};
use crate::succinct::{EliasFano, GolombRice};

/// Per-bucket seeds and cell offsets.
///
/// `offset(b)` is the first cell of bucket `b`, `offset(num_buckets)` the
/// total number of cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum BucketMeta {
    Plain {
        seeds: Vec<u64>,
        offsets: Vec<u64>,
    },
    Compressed {
        seeds: GolombRice,
        offsets: EliasFano,
    },
}

impl BucketMeta {
    pub fn new(seeds: Vec<u64>, offsets: Vec<u64>, compressed: bool) -> Result<Self> {
        debug_assert_eq!(seeds.len() + 1, offsets.len());
        Ok(if compressed {
            BucketMeta::Compressed {
                seeds: GolombRice::with_mean_parameter(&seeds)?,
                offsets: EliasFano::new(&offsets)?,
            }
        } else {
            BucketMeta::Plain { seeds, offsets }
        })
    }

    pub fn is_compressed(&self) -> bool {
        matches!(self, BucketMeta::Compressed { .. })
    }

    pub fn num_buckets(&self) -> usize {
        match self {
            BucketMeta::Plain { seeds, .. } => seeds.len(),
            BucketMeta::Compressed { seeds, .. } => seeds.len(),
        }
    }

    /// Seed, first cell and cell count of bucket `b`.
    #[inline]
    pub fn get(&self, b: usize) -> (u64, u64, u64) {
        match self {
            BucketMeta::Plain { seeds, offsets } => {
                (seeds[b], offsets[b], offsets[b + 1] - offsets[b])
            }
            BucketMeta::Compressed { seeds, offsets } => {
                let lo = offsets.get_unchecked(b);
                let hi = offsets.get_unchecked(b + 1);
                (seeds.get_unchecked(b), lo, hi - lo)
            }
        }
    }

    pub fn total_cells(&self) -> u64 {
        match self {
            BucketMeta::Plain { offsets, .. } => *offsets.last().unwrap_or(&0),
            BucketMeta::Compressed { offsets, .. } => match offsets.len() {
                0 => 0,
                n => offsets.get_unchecked(n - 1),
            },
        }
    }

    pub fn seed_bits(&self) -> u64 {
        match self {
            BucketMeta::Plain { seeds, .. } => codec::words_bits(seeds.len()),
            BucketMeta::Compressed { seeds, .. } => seeds.serialized_bits(),
        }
    }

    pub fn offset_bits(&self) -> u64 {
        match self {
            BucketMeta::Plain { offsets, .. } => codec::words_bits(offsets.len()),
            BucketMeta::Compressed { offsets, .. } => offsets.serialized_bits(),
        }
    }

    pub fn write(&self, w: &mut Writer) {
        match self {
            BucketMeta::Plain { seeds, offsets } => {
                w.words(seeds);
                w.words(offsets);
            }
            BucketMeta::Compressed { seeds, offsets } => {
                seeds.write(w);
                offsets.write(w);
            }
        }
    }

    pub fn read(r: &mut Reader, compressed: bool) -> Result<Self> {
        let meta = if compressed {
            BucketMeta::Compressed {
                seeds: GolombRice::read(r)?,
                offsets: EliasFano::read(r)?,
            }
        } else {
            let seeds = r.words()?;
            let offsets = r.words()?;
            if offsets.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Malformed("bucket offsets not monotone".into()));
            }
            BucketMeta::Plain { seeds, offsets }
        };
        let (s, o) = match &meta {
            BucketMeta::Plain { seeds, offsets } => (seeds.len(), offsets.len()),
            BucketMeta::Compressed { seeds, offsets } => (seeds.len(), offsets.len()),
        };
        if s == 0 || s + 1 != o {
            return Err(Error::Malformed(format!(
                "{s} bucket seeds but {o} offsets"
            )));
        }
        Ok(meta)
    }
}
