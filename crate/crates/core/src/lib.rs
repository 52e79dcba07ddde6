//! Perfect hash functions built from many small, overloaded, irregular
//! cuckoo hash tables.
//!
//! Keys are hashed into buckets of expected size `b`. Each bucket gets its
//! own cuckoo table where every key has 2, 4 or 8 candidate cells depending
//! on its class. The index of the candidate cell that finally holds a key is
//! stored in one of three static retrieval structures (1, 2 or 3 bits per
//! key). A query hashes the key, looks up the bucket's seed and offset and
//! the stored index, and recomputes the cell.
//!
//! ```
//! use sichash::{PhfConfig, SicHash};
//!
//! let keys: Vec<String> = (0..1000).map(|i| format!("key-{i}")).collect();
//! let config = PhfConfig::new(0.9, 2.0, 0.5).unwrap();
//! let phf = SicHash::build(&keys, &config).unwrap();
//! let mut seen = std::collections::HashSet::new();
//! for k in &keys {
//!     let v = phf.evaluate(k.as_bytes());
//!     assert!(v < phf.range());
//!     assert!(seen.insert(v));
//! }
//! ```

mod codec;
pub mod cuckoo;
mod error;
pub mod hashing;
pub mod phf;
pub mod retrieval;
pub mod succinct;
pub mod thresholds;

pub use error::{Error, Result};
pub use hashing::{GlobalSeed, KeyClass, MasterHash};
pub use phf::{BuildStats, PhfConfig, SicHash, SpaceBreakdown};
