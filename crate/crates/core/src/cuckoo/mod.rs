//! Small irregular cuckoo hash tables, one per bucket.
//!
//! Keys are inserted with rattle kicking: every key carries a counter, the
//! candidate cell it tries is `counter mod degree`, and it may only evict an
//! occupant whose counter is strictly lower. When a table cannot be filled
//! within the step budget, the bucket seed is incremented and the whole table
//! is rebuilt.

mod experiment;
mod matching;
mod rattle;

pub use experiment::{
    incremental_load_experiment, incremental_load_trial, write_load_csv, LoadSummary,
    DEFAULT_INSERT_BUDGET_FACTOR,
};
pub use matching::{hopcroft_karp, matching_oracle, BipartiteGraph};
pub use rattle::RattleTable;

use crate::error::{Error, Result};
use crate::hashing::{cell_of, KeyClass, MasterHash};

/// Seeds tried per bucket before giving up.
pub const DEFAULT_MAX_BUCKET_SEEDS: u64 = 1 << 16;

/// Steps allowed per key in one seed attempt.
pub const DEFAULT_BUDGET_PER_KEY: u64 = 100;

/// Keys of one bucket and its table size.
#[derive(Debug, Clone, Copy)]
pub struct BucketInput<'a> {
    pub entries: &'a [(MasterHash, KeyClass)],
    pub m: u64,
}

/// Outcome of a successful bucket construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementResult {
    /// Smallest seed for which insertion succeeded.
    pub seed: u64,
    /// Chosen function index per entry, in input order.
    pub assignments: Vec<u8>,
    /// Insertion steps summed over all tried seeds.
    pub displacements: u64,
}

/// Cells of a table holding `n` keys at load factor `alpha`:
/// `max(n, round(n / alpha))`.
pub fn table_size(n: usize, alpha: f64) -> u64 {
    let m = (n as f64 / alpha).round() as u64;
    m.max(n as u64)
}

/// Default step budget for one seed attempt of a table with `n` keys.
pub fn default_budget(n: usize) -> u64 {
    (DEFAULT_BUDGET_PER_KEY * n as u64).max(1)
}

/// Builds the table of one bucket, trying seeds 0, 1, 2, ...
pub fn build_bucket(input: &BucketInput, budget: u64) -> Result<PlacementResult> {
    build_bucket_with(input, budget, DEFAULT_MAX_BUCKET_SEEDS)
}

/// [`build_bucket`] with an explicit seed limit.
pub fn build_bucket_with(
    input: &BucketInput,
    budget: u64,
    max_seeds: u64,
) -> Result<PlacementResult> {
    let n = input.entries.len();
    if (input.m as u128) < n as u128 {
        return Err(Error::InvalidValue(format!(
            "{n} keys do not fit into {} cells",
            input.m
        )));
    }
    let mut table = RattleTable::new(input.m, 0);
    for &(h, class) in input.entries {
        table.push_entry(h, class);
    }
    let mut displacements = 0;
    for seed in 0..max_seeds {
        table.reset(seed);
        let ok = (0..n).all(|e| {
            let remaining = budget.saturating_sub(table.steps());
            remaining > 0 && table.insert(e, remaining)
        });
        displacements += table.steps();
        if ok {
            return Ok(PlacementResult {
                seed,
                assignments: table.assignments().to_vec(),
                displacements,
            });
        }
    }
    Err(Error::BucketUnconstructible { seeds: max_seeds })
}

/// Checks that `assignments` maps the entries to pairwise distinct cells.
pub fn placement_is_valid(input: &BucketInput, seed: u64, assignments: &[u8]) -> bool {
    if assignments.len() != input.entries.len() {
        return false;
    }
    let mut used = vec![false; input.m as usize];
    input
        .entries
        .iter()
        .zip(assignments)
        .all(|(&(h, class), &f)| {
            if f as u32 >= class.degree() {
                return false;
            }
            let c = cell_of(h, seed, f as u32, input.m) as usize;
            !std::mem::replace(&mut used[c], true)
        })
}
