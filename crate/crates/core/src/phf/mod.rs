//! The perfect hash function: partitioning into buckets, one small cuckoo
//! table per bucket, and three retrieval structures storing the chosen
//! function index of every key.

mod config;
mod meta;
mod minimal;

pub use config::{fractions, p1_range, PhfConfig, DEFAULT_BUCKET_SIZE, DEFAULT_EPSILON_R};

use xxhash_rust::xxh3::xxh3_64;

use crate::codec::{Reader, Writer};
use crate::cuckoo::{
    build_bucket_with, default_budget, table_size, BucketInput, DEFAULT_MAX_BUCKET_SEEDS,
};
use crate::error::{Error, Result};
use crate::hashing::{
    bucket_of, cell_of, master_hash, ClassThresholds, GlobalSeed, KeyClass, MasterHash,
};
use crate::retrieval::{RetrievalConfig, RetrievalStore};
use crate::succinct::EliasFano;
use meta::BucketMeta;

const TAG: &[u8; 4] = b"SICH";
const VERSION: u32 = 1;
const FLAG_MINIMAL: u8 = 1;
const FLAG_COMPRESSED: u8 = 2;

/// Bits of the serialized form not counted by [`SicHash::bits_total`]:
/// magic and version, configuration, key and cell counts, class counts and
/// the trailing checksum.
pub const FIXED_HEADER_BITS: u64 = 8 * (8 + 6 * 8 + 1 + 2 * 8 + 3 * 8 + 8);

/// Serialized size split by component, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpaceBreakdown {
    pub keys: u64,
    /// The three retrieval structures as stored.
    pub retrieval_bits: u64,
    /// Information content of the stored function indices: `sum r * n_r`.
    pub retrieval_content_bits: u64,
    pub seed_bits: u64,
    pub offset_bits: u64,
    pub remap_bits: u64,
}

impl SpaceBreakdown {
    /// Serialized payload, excluding [`FIXED_HEADER_BITS`].
    pub fn total_bits(&self) -> u64 {
        self.retrieval_bits + self.seed_bits + self.offset_bits + self.remap_bits
    }

    pub fn per_object(&self, bits: u64) -> f64 {
        if self.keys == 0 {
            0.0
        } else {
            bits as f64 / self.keys as f64
        }
    }
}

/// Counters collected during construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BuildStats {
    pub num_buckets: u64,
    /// Largest bucket seed.
    pub max_seed: u64,
    /// Sum of bucket seeds, i.e. failed table attempts.
    pub retries: u64,
    /// Insertion steps over all buckets and attempts.
    pub displacements: u64,
    /// Keys with 2, 4 and 8 choices.
    pub class_counts: [u64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SicHash {
    config: PhfConfig,
    thresholds: ClassThresholds,
    n: u64,
    m: u64,
    class_counts: [u64; 3],
    meta: BucketMeta,
    stores: [RetrievalStore; 3],
    remap: Option<EliasFano>,
}

impl SicHash {
    /// Builds a perfect hash function for `keys`, which must be distinct.
    pub fn build<K: AsRef<[u8]>>(keys: &[K], config: &PhfConfig) -> Result<Self> {
        Self::build_with_stats(keys, config).map(|(phf, _)| phf)
    }

    pub fn build_with_stats<K: AsRef<[u8]>>(
        keys: &[K],
        config: &PhfConfig,
    ) -> Result<(Self, BuildStats)> {
        let hashes: Vec<MasterHash> = keys
            .iter()
            .map(|k| master_hash(k.as_ref(), config.global_seed))
            .collect();
        Self::build_from_hashes(&hashes, config)
    }

    /// Builds from precomputed master hashes.
    pub fn build_from_hashes(
        hashes: &[MasterHash],
        config: &PhfConfig,
    ) -> Result<(Self, BuildStats)> {
        config.validate()?;
        if hashes.is_empty() {
            return Err(Error::InvalidValue("empty key set".into()));
        }
        let n = hashes.len() as u64;
        let num_buckets = ((n as f64 / config.bucket_size as f64).round() as u64).max(1);
        let (p1, p2, _) = config.fractions();
        let thresholds = ClassThresholds::new(p1, p2);

        let mut sorted: Vec<(u64, MasterHash)> = hashes
            .iter()
            .map(|&h| (bucket_of(h, num_buckets), h))
            .collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0].1 == w[1].1) {
            return Err(Error::DuplicateKeys);
        }

        let mut stats = BuildStats {
            num_buckets,
            ..BuildStats::default()
        };
        let mut seeds = Vec::with_capacity(num_buckets as usize);
        let mut offsets = Vec::with_capacity(num_buckets as usize + 1);
        offsets.push(0u64);
        let mut pairs: [Vec<(MasterHash, u8)>; 3] = Default::default();
        let mut entries: Vec<(MasterHash, KeyClass)> = Vec::new();
        let mut rest = &sorted[..];
        for b in 0..num_buckets {
            let len = rest.iter().take_while(|e| e.0 == b).count();
            let (bucket, tail) = rest.split_at(len);
            rest = tail;
            entries.clear();
            entries.extend(bucket.iter().map(|&(_, h)| (h, thresholds.class_of(h))));
            let input = BucketInput {
                entries: &entries,
                m: table_size(len, config.alpha),
            };
            let placed = build_bucket_with(&input, default_budget(len), config.max_bucket_seeds)
                .map_err(|e| match e {
                    Error::BucketUnconstructible { .. } => {
                        Error::AlphaTooAggressive { bucket: b as usize }
                    }
                    e => e,
                })?;
            for (&(h, class), &f) in entries.iter().zip(&placed.assignments) {
                pairs[class.index()].push((h, f));
            }
            stats.max_seed = stats.max_seed.max(placed.seed);
            stats.retries += placed.seed;
            stats.displacements += placed.displacements;
            seeds.push(placed.seed);
            offsets.push(offsets.last().unwrap() + input.m);
        }
        debug_assert!(rest.is_empty());
        drop(sorted);

        let m = *offsets.last().unwrap();
        let rconfig = RetrievalConfig {
            epsilon: config.epsilon_r,
            ..RetrievalConfig::default()
        };
        let mut stores: [RetrievalStore; 3] = Default::default();
        for class in KeyClass::ALL {
            let i = class.index();
            stats.class_counts[i] = pairs[i].len() as u64;
            stores[i] = RetrievalStore::build(&pairs[i], class.bits(), &rconfig)?;
            pairs[i] = Vec::new();
        }

        let mut phf = Self {
            config: PhfConfig {
                minimal: false,
                ..*config
            },
            thresholds,
            n,
            m,
            class_counts: stats.class_counts,
            meta: BucketMeta::new(seeds, offsets, config.compressed_metadata)?,
            stores,
            remap: None,
        };
        if config.minimal {
            phf.minimize_hashes(hashes)?;
        }
        Ok((phf, stats))
    }

    /// Adds the remap into `[0, N)`. `keys` must be the construction keys.
    pub fn minimize<K: AsRef<[u8]>>(mut self, keys: &[K]) -> Result<Self> {
        let hashes: Vec<MasterHash> = keys
            .iter()
            .map(|k| master_hash(k.as_ref(), self.config.global_seed))
            .collect();
        self.minimize_hashes(&hashes)?;
        Ok(self)
    }

    fn minimize_hashes(&mut self, hashes: &[MasterHash]) -> Result<()> {
        let values: Vec<u64> = hashes.iter().map(|&h| self.evaluate_unmapped(h)).collect();
        self.remap = Some(minimal::build_remap_ef(&values, self.n, self.m)?);
        self.config.minimal = true;
        Ok(())
    }

    #[inline]
    pub fn evaluate(&self, key: &[u8]) -> u64 {
        self.evaluate_hash(master_hash(key, self.config.global_seed))
    }

    #[inline]
    pub fn evaluate_hash(&self, h: MasterHash) -> u64 {
        let v = self.evaluate_unmapped(h);
        match &self.remap {
            Some(remap) if v >= self.n => remap.get_unchecked((v - self.n) as usize),
            _ => v,
        }
    }

    /// Cell index in `[0, M)` before the minimal remap.
    #[inline]
    pub fn evaluate_unmapped(&self, h: MasterHash) -> u64 {
        let b = bucket_of(h, self.meta.num_buckets() as u64) as usize;
        let (seed, offset, m) = self.meta.get(b);
        if m == 0 {
            // only reachable for keys outside the set
            return 0;
        }
        let class = self.thresholds.class_of(h);
        let f = self.stores[class.index()].query(h);
        offset + cell_of(h, seed, f as u32, m)
    }

    /// Size of the output range: `M`, or `N` when minimal.
    pub fn range(&self) -> u64 {
        if self.is_minimal() {
            self.n
        } else {
            self.m
        }
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Total number of table cells `M`.
    pub fn num_cells(&self) -> u64 {
        self.m
    }

    pub fn num_buckets(&self) -> u64 {
        self.meta.num_buckets() as u64
    }

    pub fn is_minimal(&self) -> bool {
        self.remap.is_some()
    }

    pub fn config(&self) -> &PhfConfig {
        &self.config
    }

    /// Keys with 2, 4 and 8 choices.
    pub fn class_counts(&self) -> [u64; 3] {
        self.class_counts
    }

    pub fn space(&self) -> SpaceBreakdown {
        SpaceBreakdown {
            keys: self.n,
            retrieval_bits: self
                .stores
                .iter()
                .map(RetrievalStore::serialized_bits)
                .sum(),
            retrieval_content_bits: KeyClass::ALL
                .iter()
                .map(|c| c.bits() as u64 * self.class_counts[c.index()])
                .sum(),
            seed_bits: self.meta.seed_bits(),
            offset_bits: self.meta.offset_bits(),
            remap_bits: self.remap.as_ref().map_or(0, EliasFano::serialized_bits),
        }
    }

    /// Exact serialized payload in bits, i.e. everything but the fixed header.
    pub fn bits_total(&self) -> u64 {
        self.space().total_bits()
    }

    pub fn bits_per_object(&self) -> f64 {
        self.bits_total() as f64 / self.n as f64
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.config;
        let mut w = Writer::new();
        w.header(TAG, VERSION);
        w.f64(c.alpha);
        w.f64(c.beta);
        w.f64(c.x);
        w.u64(c.bucket_size as u64);
        w.u64(c.global_seed.0);
        w.f64(c.epsilon_r);
        let mut flags = 0;
        if self.is_minimal() {
            flags |= FLAG_MINIMAL;
        }
        if self.meta.is_compressed() {
            flags |= FLAG_COMPRESSED;
        }
        w.u8(flags);
        w.u64(self.n);
        w.u64(self.m);
        for &count in &self.class_counts {
            w.u64(count);
        }
        self.meta.write(&mut w);
        for s in &self.stores {
            s.write(&mut w);
        }
        if let Some(remap) = &self.remap {
            remap.write(&mut w);
        }
        let mut bytes = w.into_inner();
        let checksum = xxh3_64(&bytes);
        bytes.extend_from_slice(&checksum.to_le_bytes());
        bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if (bytes.len() as u64) * 8 < FIXED_HEADER_BITS {
            return Err(Error::Truncated);
        }
        let (body, tail) = bytes.split_at(bytes.len() - 8);
        if xxh3_64(body).to_le_bytes() != tail {
            // a foreign file is more likely than a corrupted magic
            if &body[..4] != TAG {
                return Reader::new(body)
                    .header(TAG, VERSION)
                    .and(Err(Error::ChecksumMismatch));
            }
            return Err(Error::ChecksumMismatch);
        }
        let mut r = Reader::new(body);
        r.header(TAG, VERSION)?;
        let config = PhfConfig {
            alpha: r.f64()?,
            beta: r.f64()?,
            x: r.f64()?,
            bucket_size: r.usize()?,
            global_seed: GlobalSeed(r.u64()?),
            epsilon_r: r.f64()?,
            minimal: false,
            compressed_metadata: false,
            max_bucket_seeds: DEFAULT_MAX_BUCKET_SEEDS,
        };
        let flags = r.u8()?;
        if flags & !(FLAG_MINIMAL | FLAG_COMPRESSED) != 0 {
            return Err(Error::Malformed(format!("unknown flags {flags:#x}")));
        }
        let config = PhfConfig {
            minimal: flags & FLAG_MINIMAL != 0,
            compressed_metadata: flags & FLAG_COMPRESSED != 0,
            ..config
        };
        config
            .validate()
            .map_err(|e| Error::Malformed(e.to_string()))?;
        let n = r.u64()?;
        let m = r.u64()?;
        let class_counts = [r.u64()?, r.u64()?, r.u64()?];
        let meta = BucketMeta::read(&mut r, config.compressed_metadata)?;
        let stores = [
            RetrievalStore::read(&mut r)?,
            RetrievalStore::read(&mut r)?,
            RetrievalStore::read(&mut r)?,
        ];
        let remap = if config.minimal {
            Some(EliasFano::read(&mut r)?)
        } else {
            None
        };
        r.finish()?;

        if n == 0 || m < n || meta.total_cells() != m {
            return Err(Error::Malformed(format!("{n} keys in {m} cells")));
        }
        if class_counts.iter().try_fold(0u64, |a, &c| a.checked_add(c)) != Some(n) {
            return Err(Error::Malformed("class counts do not add up".into()));
        }
        for class in KeyClass::ALL {
            if stores[class.index()].bits() != class.bits() {
                return Err(Error::Malformed("retrieval stores out of order".into()));
            }
        }
        if let Some(remap) = &remap {
            if remap.len() as u64 != m - n || remap.iter().last().is_some_and(|v| v >= n) {
                return Err(Error::Malformed("remap does not fit the key count".into()));
            }
        }
        let (p1, p2, _) = config.fractions();
        Ok(Self {
            config,
            thresholds: ClassThresholds::new(p1, p2),
            n,
            m,
            class_counts,
            meta,
            stores,
            remap,
        })
    }
}
