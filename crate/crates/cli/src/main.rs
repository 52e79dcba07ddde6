mod keys;
mod report;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sichash::cuckoo::{incremental_load_experiment, write_load_csv, LoadSummary};
use sichash::thresholds::{solve_threshold, ClassMix, DEFAULT_TOLERANCE};
use sichash::{PhfConfig, SicHash};

use report::{BenchReport, RunReport, SpaceReport};

#[derive(Parser)]
#[command(
    name = "sichash",
    version,
    about = "Perfect hashing with small irregular cuckoo tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write distinct random keys, one per line
    Keygen {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a perfect hash function and print a JSON report
    Build {
        #[arg(long)]
        keys: PathBuf,
        #[arg(long, default_value_t = 0.9)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.5)]
        x: f64,
        #[arg(long, default_value_t = sichash::phf::DEFAULT_BUCKET_SIZE)]
        bucket_size: usize,
        /// Map onto [0, N) instead of [0, M)
        #[arg(long)]
        minimal: bool,
        /// Retrieval slack
        #[arg(long, default_value_t = sichash::phf::DEFAULT_EPSILON_R)]
        epsilon: f64,
        /// Elias-Fano offsets and Rice coded seeds
        #[arg(long)]
        compressed_meta: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Seeds tried per bucket before giving up
        #[arg(long, default_value_t = sichash::cuckoo::DEFAULT_MAX_BUCKET_SEEDS)]
        max_seeds: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that a stored function is perfect on a key file
    Verify {
        #[arg(long)]
        phf: PathBuf,
        #[arg(long)]
        keys: PathBuf,
    },
    /// Measure query throughput on a single thread
    Bench {
        #[arg(long)]
        phf: PathBuf,
        #[arg(long)]
        keys: PathBuf,
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
    /// Fill single tables incrementally; CSV on stdout, summary on stderr
    Overload {
        #[arg(long)]
        m: u64,
        /// A, B, C, D, binary, or percentages like 33/34/33
        #[arg(long)]
        config: String,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the load threshold of a class mix as CSV
    Thresholds {
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
    },
}

/// First violation of perfection, if any.
fn find_violation(phf: &SicHash, keys: &[Vec<u8>]) -> Option<String> {
    let range = phf.range();
    let mut owner = vec![u32::MAX; range as usize];
    for (i, k) in keys.iter().enumerate() {
        let v = phf.evaluate(k);
        if v >= range {
            return Some(format!(
                "key #{i} {} maps to {v}, outside [0, {range})",
                keys::show(k)
            ));
        }
        let prev = std::mem::replace(&mut owner[v as usize], i as u32);
        if prev != u32::MAX {
            return Some(format!(
                "keys #{prev} {} and #{i} {} both map to {v}",
                keys::show(&keys[prev as usize]),
                keys::show(k)
            ));
        }
    }
    if phf.is_minimal() && keys.len() as u64 != range {
        return Some(format!(
            "{} keys for a minimal function on {range} values",
            keys.len()
        ));
    }
    None
}

fn seconds_per_pass(phf: &SicHash, keys: &[Vec<u8>]) -> f64 {
    let t = Instant::now();
    let sum = keys
        .iter()
        .fold(0u64, |acc, k| acc.wrapping_add(phf.evaluate(k)));
    std::hint::black_box(sum);
    t.elapsed().as_secs_f64()
}

fn load_phf(path: &PathBuf) -> Result<SicHash> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    SicHash::from_bytes(&bytes).with_context(|| format!("loading {}", path.display()))
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Keygen { count, seed, out } => {
            if count == 0 {
                bail!("count must be at least 1");
            }
            keys::write(&out, &keys::generate(count, seed))?;
        }
        Command::Build {
            keys,
            alpha,
            beta,
            x,
            bucket_size,
            minimal,
            epsilon,
            compressed_meta,
            seed,
            max_seeds,
            out,
        } => {
            let keys = keys::read(&keys)?;
            let config = PhfConfig::new(alpha, beta, x)?
                .with_bucket_size(bucket_size)
                .with_minimal(minimal)
                .with_epsilon(epsilon)
                .with_compressed_metadata(compressed_meta)
                .with_seed(seed)
                .with_max_bucket_seeds(max_seeds);
            config.validate()?;
            let t = Instant::now();
            let (phf, stats) = SicHash::build_with_stats(&keys, &config)?;
            let build_seconds = t.elapsed().as_secs_f64();
            let violation = find_violation(&phf, &keys);
            let query_seconds = seconds_per_pass(&phf, &keys);
            fs::write(&out, phf.to_bytes())
                .with_context(|| format!("writing {}", out.display()))?;
            print_json(&RunReport {
                n: phf.len(),
                m: phf.num_cells(),
                alpha,
                beta,
                x,
                b: bucket_size,
                minimal,
                compressed_metadata: compressed_meta,
                num_buckets: stats.num_buckets,
                max_bucket_seed: stats.max_seed,
                build_seconds,
                queries_per_second: keys.len() as f64 / query_seconds,
                bits_per_object: SpaceReport::of(&phf),
                verified: violation.is_none(),
            })?;
            if let Some(v) = violation {
                bail!("verification failed: {v}");
            }
        }
        Command::Verify { phf, keys } => {
            let phf = load_phf(&phf)?;
            let keys = keys::read(&keys)?;
            if let Some(v) = find_violation(&phf, &keys) {
                bail!("FAIL: {v}");
            }
            println!(
                "PASS: {} keys, distinct values in [0, {}){}",
                keys.len(),
                phf.range(),
                if phf.is_minimal() {
                    ", a permutation"
                } else {
                    ""
                }
            );
        }
        Command::Bench { phf, keys, reps } => {
            if reps == 0 {
                bail!("reps must be at least 1");
            }
            let phf = load_phf(&phf)?;
            let mut keys = keys::read(&keys)?;
            keys.shuffle(&mut ChaCha8Rng::seed_from_u64(0));
            let seconds: Vec<f64> = (0..reps).map(|_| seconds_per_pass(&phf, &keys)).collect();
            let mut sorted = seconds.clone();
            sorted.sort_by(f64::total_cmp);
            let rate = |s: f64| keys.len() as f64 / s / 1e6;
            print_json(&BenchReport {
                keys: keys.len(),
                reps,
                best_mqueries_per_second: rate(sorted[0]),
                median_mqueries_per_second: rate(sorted[sorted.len() / 2]),
                seconds,
            })?;
        }
        Command::Overload {
            m,
            config,
            trials,
            seed,
        } => {
            let mix = ClassMix::named(&config)?;
            let samples = incremental_load_experiment(m, &mix, trials, seed);
            write_load_csv(io::stdout().lock(), &samples)?;
            if let Some(s) = LoadSummary::from_samples(&samples) {
                eprintln!(
                    "min {:.4} q1 {:.4} median {:.4} q3 {:.4} max {:.4}",
                    s.min, s.q1, s.median, s.q3, s.max
                );
            }
        }
        Command::Thresholds { p1, p2 } => {
            let mix = ClassMix::from_p1_p2(p1, p2)?;
            let t = solve_threshold(&mix, DEFAULT_TOLERANCE)?;
            println!("p1,p2,p3,d_bar,lambda_star,c_star");
            println!(
                "{},{},{},{},{},{}",
                mix.p1(),
                mix.p2(),
                mix.p3(),
                mix.d_bar(),
                t.lambda_star.map_or(String::new(), |l| l.to_string()),
                t.c_star
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
