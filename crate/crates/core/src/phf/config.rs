use crate::cuckoo::DEFAULT_MAX_BUCKET_SEEDS;
use crate::error::{Error, Result};
use crate::hashing::GlobalSeed;

pub const DEFAULT_BUCKET_SIZE: usize = 5000;
pub const DEFAULT_EPSILON_R: f64 = 0.10;

/// Construction parameters.
///
/// `beta` is the retrieval budget in bits per key and `x` in `[0, 1]` picks
/// one of the class mixes with exactly that budget:
///
/// ```text
/// p1_min = max(0, 2 - beta)    p1_max = (3 - beta) / 2
/// p1 = p1_min + x (p1_max - p1_min)
/// p2 = 3 - 2 p1 - beta         p3 = 1 - p1 - p2
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhfConfig {
    /// Load factor `N / M` of every bucket table.
    pub alpha: f64,
    pub beta: f64,
    pub x: f64,
    /// Expected keys per bucket.
    pub bucket_size: usize,
    pub global_seed: GlobalSeed,
    /// Remap into `[0, N)`.
    pub minimal: bool,
    /// Slack of the retrieval structures.
    pub epsilon_r: f64,
    /// Store offsets with Elias-Fano and seeds with Rice codes instead of
    /// plain words.
    pub compressed_metadata: bool,
    /// Seeds tried per bucket before construction gives up. Only used while
    /// building and not serialized.
    pub max_bucket_seeds: u64,
}

impl PhfConfig {
    pub fn new(alpha: f64, beta: f64, x: f64) -> Result<Self> {
        let c = Self {
            alpha,
            beta,
            x,
            bucket_size: DEFAULT_BUCKET_SIZE,
            global_seed: GlobalSeed::default(),
            minimal: false,
            epsilon_r: DEFAULT_EPSILON_R,
            compressed_metadata: false,
            max_bucket_seeds: DEFAULT_MAX_BUCKET_SEEDS,
        };
        c.validate()?;
        Ok(c)
    }

    /// Configuration with explicit two- and four-choice fractions.
    pub fn from_fractions(alpha: f64, p1: f64, p2: f64) -> Result<Self> {
        let p3 = 1.0 - p1 - p2;
        if !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) || p3 < -1e-12 {
            return Err(Error::InvalidConfig(format!(
                "fractions p1 = {p1}, p2 = {p2} are not a distribution"
            )));
        }
        let beta = p1 + 2.0 * p2 + 3.0 * p3.max(0.0);
        let (lo, hi) = p1_range(beta);
        let x = if hi - lo > 0.0 {
            (p1 - lo) / (hi - lo)
        } else {
            0.0
        };
        Self::new(alpha, beta, x.clamp(0.0, 1.0))
    }

    pub fn with_bucket_size(mut self, bucket_size: usize) -> Self {
        self.bucket_size = bucket_size;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.global_seed = GlobalSeed(seed);
        self
    }

    pub fn with_minimal(mut self, minimal: bool) -> Self {
        self.minimal = minimal;
        self
    }

    pub fn with_epsilon(mut self, epsilon_r: f64) -> Self {
        self.epsilon_r = epsilon_r;
        self
    }

    pub fn with_compressed_metadata(mut self, compressed: bool) -> Self {
        self.compressed_metadata = compressed;
        self
    }

    pub fn with_max_bucket_seeds(mut self, seeds: u64) -> Self {
        self.max_bucket_seeds = seeds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidConfig(what));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha = {} outside (0, 1]", self.alpha));
        }
        if !(1.0..=3.0).contains(&self.beta) {
            return bad(format!("beta = {} outside [1, 3]", self.beta));
        }
        if !(0.0..=1.0).contains(&self.x) {
            return bad(format!("x = {} outside [0, 1]", self.x));
        }
        if self.bucket_size == 0 {
            return bad("bucket size 0".into());
        }
        if self.max_bucket_seeds == 0 {
            return bad("no bucket seeds allowed".into());
        }
        if !(self.epsilon_r.is_finite() && self.epsilon_r >= 0.0) {
            return bad(format!("epsilon = {}", self.epsilon_r));
        }
        Ok(())
    }

    /// Class fractions `(p1, p2, p3)`.
    pub fn fractions(&self) -> (f64, f64, f64) {
        fractions(self.beta, self.x)
    }
}

/// Range of admissible two-choice fractions for budget `beta`.
pub fn p1_range(beta: f64) -> (f64, f64) {
    ((2.0 - beta).max(0.0), (3.0 - beta) / 2.0)
}

/// Class fractions for budget `beta` and interpolation `x`.
pub fn fractions(beta: f64, x: f64) -> (f64, f64, f64) {
    let (lo, hi) = p1_range(beta);
    let p1 = lo + x * (hi - lo);
    let p2 = (3.0 - 2.0 * p1 - beta).max(0.0);
    let p3 = (1.0 - p1 - p2).max(0.0);
    (p1, p2, p3)
}
