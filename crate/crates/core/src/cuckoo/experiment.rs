use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RattleTable;
use crate::hashing::{ClassThresholds, MasterHash};
use crate::thresholds::ClassMix;

/// Per-insert step budget of the incremental experiment, in multiples of the
/// table size.
pub const DEFAULT_INSERT_BUDGET_FACTOR: u64 = 100;

/// Fills one table of `m` cells with random keys until the first insertion
/// fails (or the table is full) and returns the load reached before it.
pub fn incremental_load_trial(
    m: u64,
    mix: &ClassMix,
    rng: &mut impl Rng,
    insert_budget: u64,
) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let thresholds = ClassThresholds::new(mix.p1(), mix.p2());
    let mut table = RattleTable::new(m, 0);
    let mut placed = 0u64;
    while placed < m {
        let h = MasterHash::new(rng.gen(), rng.gen());
        let e = table.push_entry(h, thresholds.class_of(h));
        if !table.insert(e, insert_budget) {
            break;
        }
        placed += 1;
    }
    placed as f64 / m as f64
}

/// Achieved load factors of `trials` independent incremental constructions.
/// Trial `t` draws its keys from ChaCha8 stream `t` of `seed`.
pub fn incremental_load_experiment(m: u64, mix: &ClassMix, trials: usize, seed: u64) -> Vec<f64> {
    let budget = DEFAULT_INSERT_BUDGET_FACTOR * m.max(1);
    (0..trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            incremental_load_trial(m, mix, &mut rng, budget)
        })
        .collect()
}

/// Writes samples as `trial,achieved_load` CSV with a header line.
pub fn write_load_csv<W: Write>(mut out: W, samples: &[f64]) -> io::Result<()> {
    writeln!(out, "trial,achieved_load")?;
    for (t, s) in samples.iter().enumerate() {
        writeln!(out, "{t},{s}")?;
    }
    Ok(())
}

/// Five-number summary, quartiles by linear interpolation between order
/// statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl LoadSummary {
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let quantile = |q: f64| {
            let pos = q * (s.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
        };
        Some(Self {
            min: s[0],
            q1: quantile(0.25),
            median: quantile(0.5),
            q3: quantile(0.75),
            max: s[s.len() - 1],
        })
    }
}
