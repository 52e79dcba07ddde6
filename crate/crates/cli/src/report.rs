use serde::Serialize;
use sichash::phf::FIXED_HEADER_BITS;
use sichash::SicHash;

/// Space per key, in bits.
#[derive(Debug, Clone, Serialize)]
pub struct SpaceReport {
    pub total: f64,
    pub retrieval: f64,
    /// `sum r * n_r / N`, what the stored function indices carry.
    pub retrieval_content: f64,
    pub seeds: f64,
    pub offsets: f64,
    pub remap: f64,
    pub header: f64,
}

impl SpaceReport {
    pub fn of(phf: &SicHash) -> Self {
        let s = phf.space();
        Self {
            total: s.per_object(s.total_bits() + FIXED_HEADER_BITS),
            retrieval: s.per_object(s.retrieval_bits),
            retrieval_content: s.per_object(s.retrieval_content_bits),
            seeds: s.per_object(s.seed_bits),
            offsets: s.per_object(s.offset_bits),
            remap: s.per_object(s.remap_bits),
            header: s.per_object(FIXED_HEADER_BITS),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub n: u64,
    pub m: u64,
    pub alpha: f64,
    pub beta: f64,
    pub x: f64,
    pub b: usize,
    pub minimal: bool,
    pub compressed_metadata: bool,
    pub num_buckets: u64,
    pub max_bucket_seed: u64,
    pub build_seconds: f64,
    pub queries_per_second: f64,
    pub bits_per_object: SpaceReport,
    /// Set only after all keys were evaluated and found distinct and in range.
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub keys: usize,
    pub reps: usize,
    pub seconds: Vec<f64>,
    pub best_mqueries_per_second: f64,
    pub median_mqueries_per_second: f64,
}
