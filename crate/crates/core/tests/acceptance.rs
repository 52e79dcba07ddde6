//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines appear in order. The process
//! fails when any criterion fails except those listed in `KNOWN_DEVIATIONS`,
//! which are still reported as FAIL.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sichash::cuckoo::{
    build_bucket, build_bucket_with, default_budget, incremental_load_experiment, matching_oracle,
    placement_is_valid, table_size, BucketInput, LoadSummary,
};
use sichash::hashing::ClassThresholds;
use sichash::phf::FIXED_HEADER_BITS;
use sichash::retrieval::{RetrievalConfig, RetrievalStore};
use sichash::succinct::{BitVector, EliasFano, GolombRice};
use sichash::thresholds::{solve_threshold, ClassMix, DEFAULT_TOLERANCE};
use sichash::{KeyClass, MasterHash, PhfConfig, SicHash};

/// Criterion 7 pins 0.8889, but the stated formula 1 - 3 (1/3)^4 is 26/27
/// and that is what both enumeration and simulation give.
const KNOWN_DEVIATIONS: &[u32] = &[7];

const PROPTEST_CASES: u32 = 10_000;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Distinct random keys of 10 to 50 bytes, no zero or newline bytes.
fn random_keys(count: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::with_capacity(count);
    let mut keys = Vec::with_capacity(count);
    while keys.len() < count {
        let len = rng.gen_range(10..=50);
        let key: Vec<u8> = (0..len)
            .map(|_| loop {
                let b: u8 = rng.gen_range(1..=255);
                if b != b'\n' {
                    break b;
                }
            })
            .collect();
        if seen.insert(key.clone()) {
            keys.push(key);
        }
    }
    keys
}

/// Distinct values in `[0, range)` for all keys.
fn is_perfect(phf: &SicHash, keys: &[Vec<u8>]) -> bool {
    let mut seen = vec![false; phf.range() as usize];
    keys.iter().all(|k| {
        let v = phf.evaluate(k);
        v < phf.range() && !std::mem::replace(&mut seen[v as usize], true)
    })
}

/// `P(X >= wins)` for `X ~ Binomial(n, 1/2)`.
fn sign_test_p_value(wins: u64, n: u64) -> f64 {
    let mut pmf = 0.5f64.powi(n as i32);
    let mut tail = 0.0;
    for k in 0..=n {
        if k >= wins {
            tail += pmf;
        }
        pmf *= (n - k) as f64 / (k + 1) as f64;
    }
    tail
}

fn perfection() -> Outcome {
    let keys = random_keys(1_000_000, 1);
    let mut details = Vec::new();
    let mut ok = true;
    for alpha in [0.8, 0.85, 0.9, 0.95, 0.97] {
        let config = PhfConfig::new(alpha, 2.0, 0.3).map_err(|e| e.to_string())?;
        let t = Instant::now();
        let phf = SicHash::build(&keys, &config).map_err(|e| format!("alpha {alpha}: {e}"))?;
        let elapsed = secs(t.elapsed());
        let perfect = is_perfect(&phf, &keys);
        ok &= perfect && elapsed <= 60.0;
        details.push(format!(
            "a={alpha} {} {elapsed:.1}s",
            if perfect { "ok" } else { "COLLISION" }
        ));
    }
    check(ok, format!("N=1e6, {}", details.join(", ")))
}

fn minimal_bijectivity() -> Outcome {
    let keys = random_keys(100_000, 2);
    let config = PhfConfig::new(0.95, 2.0, 0.3)
        .map_err(|e| e.to_string())?
        .with_minimal(true);
    let phf = SicHash::build(&keys, &config).map_err(|e| e.to_string())?;
    let mut values: Vec<u64> = keys.iter().map(|k| phf.evaluate(k)).collect();
    values.sort_unstable();
    let permutation = values.iter().enumerate().all(|(i, &v)| v == i as u64);
    check(
        permutation && phf.range() == 100_000,
        format!(
            "N=1e5, M={}, sorted values == 0..N: {permutation}",
            phf.num_cells()
        ),
    )
}

fn threshold_solver() -> Outcome {
    let t = Instant::now();
    let binary = solve_threshold(&ClassMix::new(1.0, 0.0, 0.0).unwrap(), DEFAULT_TOLERANCE)
        .map_err(|e| e.to_string())?
        .c_star;
    let quad = solve_threshold(&ClassMix::new(0.0, 1.0, 0.0).unwrap(), DEFAULT_TOLERANCE)
        .map_err(|e| e.to_string())?
        .c_star;
    let elapsed = secs(t.elapsed());
    check(
        (binary - 0.5).abs() <= 1e-3 && (quad - 0.9768).abs() <= 5e-4 && elapsed < 1.0,
        format!("c*(1,0,0)={binary:.5}, c*(0,1,0)={quad:.5}, {elapsed:.2}s"),
    )
}

fn overload_calibration() -> Outcome {
    let t = Instant::now();
    let samples = incremental_load_experiment(500, &ClassMix::named("binary").unwrap(), 199, 4);
    let elapsed = secs(t.elapsed());
    let median = LoadSummary::from_samples(&samples).unwrap().median;
    check(
        (0.54..=0.58).contains(&median) && elapsed < 30.0,
        format!("m=500, 199 trials, median {median:.4}, {elapsed:.2}s"),
    )
}

fn configuration_ordering() -> Outcome {
    let trials = 99;
    let samples: Vec<Vec<f64>> = ["A", "B", "C", "D"]
        .iter()
        .map(|name| incremental_load_experiment(5000, &ClassMix::named(name).unwrap(), trials, 5))
        .collect();
    let medians: Vec<f64> = samples
        .iter()
        .map(|s| LoadSummary::from_samples(s).unwrap().median)
        .collect();
    let ordered = medians.windows(2).all(|w| w[0] <= w[1]);
    // trial t of every configuration draws the same hash values, so A and D
    // are paired by trial
    let (a, d) = (&samples[0], &samples[3]);
    let wins = a.iter().zip(d).filter(|(a, d)| d > a).count() as u64;
    let losses = a.iter().zip(d).filter(|(a, d)| d < a).count() as u64;
    let p = sign_test_p_value(wins, wins + losses);
    check(
        ordered && p <= 0.01,
        format!(
            "m=5000, {trials} trials, medians A {:.4} B {:.4} C {:.4} D {:.4}, sign test D>A {wins}:{losses} p={p:.2e}",
            medians[0], medians[1], medians[2], medians[3]
        ),
    )
}

fn space_accounting() -> Outcome {
    let keys = random_keys(1_000_000, 6);
    let config = PhfConfig::from_fractions(0.9768, 0.49, 0.22).map_err(|e| e.to_string())?;
    let phf = SicHash::build(&keys, &config).map_err(|e| e.to_string())?;
    let space = phf.space();
    let content = space.per_object(space.retrieval_content_bits);
    let blob_bits = phf.to_bytes().len() as u64 * 8;
    let total = blob_bits as f64 / keys.len() as f64;
    let limit = 1.80 * (1.0 + config.epsilon_r) + 0.05;
    check(
        (content - 1.80).abs() <= 0.01 && total <= limit && blob_bits == phf.bits_total() + FIXED_HEADER_BITS,
        format!(
            "content {content:.4} bits/key, serialized {total:.4} <= {limit:.2} (retrieval {:.4}, seeds {:.4}, offsets {:.4})",
            space.per_object(space.retrieval_bits),
            space.per_object(space.seed_bits),
            space.per_object(space.offset_bits),
        ),
    )
}

fn small_case_probability() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trials = 100_000;
    let mut ok = 0;
    for _ in 0..trials {
        let entries = [
            (MasterHash::new(rng.gen(), rng.gen()), KeyClass::C2),
            (MasterHash::new(rng.gen(), rng.gen()), KeyClass::C2),
        ];
        let input = BucketInput {
            entries: &entries,
            m: 3,
        };
        ok += build_bucket_with(&input, default_budget(2), 1).is_ok() as u32;
    }
    let rate = ok as f64 / trials as f64;
    let elapsed = secs(t.elapsed());
    check(
        (rate - 0.8889).abs() <= 0.01 && elapsed < 5.0,
        format!(
            "n=2, m=3, seed-0 success {rate:.4} vs 0.8889 +- 0.01 (1 - 3 (1/3)^4 = {:.4}), {elapsed:.2}s",
            1.0 - 3.0 * (1.0f64 / 3.0).powi(4)
        ),
    )
}

fn oracle_implication() -> Outcome {
    let mix = ClassMix::named("C").unwrap();
    let th = ClassThresholds::new(mix.p1(), mix.p2());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    let mut seeds = 0;
    for _ in 0..1000 {
        let entries: Vec<(MasterHash, KeyClass)> = (0..200)
            .map(|_| {
                let h = MasterHash::new(rng.gen(), rng.gen());
                (h, th.class_of(h))
            })
            .collect();
        let input = BucketInput {
            entries: &entries,
            m: table_size(200, 0.9),
        };
        let placed = build_bucket(&input, default_budget(200)).map_err(|e| e.to_string())?;
        seeds += placed.seed;
        if matching_oracle(&input, placed.seed).is_none()
            || !placement_is_valid(&input, placed.seed, &placed.assignments)
        {
            violations += 1;
        }
    }
    check(
        violations == 0,
        format!("1000 buckets n=200 alpha=0.9, {violations} violations, {seeds} seed retries"),
    )
}

fn run_proptest<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: PROPTEST_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, test)
        .map_err(|e| format!("{name}: {e}"))
}

fn codec_roundtrips() -> Outcome {
    let t = Instant::now();
    run_proptest(
        "Elias-Fano",
        prop::collection::vec(0u64..1 << 40, 0..300),
        |mut values| {
            values.sort_unstable();
            let ef = EliasFano::new(&values).unwrap();
            for (i, &v) in values.iter().enumerate() {
                prop_assert_eq!(ef.get(i).unwrap(), v);
            }
            prop_assert_eq!(EliasFano::from_bytes(&ef.to_bytes()).unwrap(), ef.clone());
            let n = values.len() as u64;
            if n > 0 {
                let universe = values[values.len() - 1] + 1;
                let per_key = (universe as f64 / n as f64).log2().ceil().max(0.0) as u64;
                prop_assert!(ef.data_bits() <= 2 * n + n * per_key + 1);
            }
            Ok(())
        },
    )?;
    run_proptest(
        "Golomb-Rice",
        (prop::collection::vec(0u64..5000, 0..300), 0u32..12),
        |(values, k)| {
            let gr = GolombRice::new(&values, k).unwrap();
            for (i, &v) in values.iter().enumerate() {
                prop_assert_eq!(gr.get(i).unwrap(), v);
            }
            prop_assert_eq!(GolombRice::from_bytes(&gr.to_bytes()).unwrap(), gr);
            Ok(())
        },
    )?;
    run_proptest(
        "select1",
        (prop::collection::vec(any::<bool>(), 0..3000), 0u32..4),
        |(bits, sparsity)| {
            // thin out the ones to also cover sparse vectors
            let bits: Vec<bool> = bits
                .iter()
                .enumerate()
                .map(|(i, &b)| b && (i as u32).is_multiple_of(1 << sparsity))
                .collect();
            let bv = BitVector::from_bits(bits.iter().copied());
            let ones: Vec<usize> = (0..bits.len()).filter(|&i| bits[i]).collect();
            for (rank, &pos) in ones.iter().enumerate() {
                prop_assert_eq!(bv.select1(rank).unwrap(), pos);
            }
            prop_assert!(bv.select1(ones.len()).is_err());
            Ok(())
        },
    )?;
    run_proptest(
        "retrieval",
        (
            prop::collection::vec((any::<u64>(), any::<u64>(), any::<u8>()), 0..200),
            1u32..=3,
            any::<u64>(),
        ),
        |(raw, bits, seed)| {
            let map: BTreeMap<MasterHash, u8> = raw
                .into_iter()
                .map(|(hi, lo, v)| (MasterHash::new(hi, lo), v & ((1 << bits) - 1)))
                .collect();
            let pairs: Vec<(MasterHash, u8)> = map.into_iter().collect();
            let config = RetrievalConfig {
                seed,
                ..RetrievalConfig::default()
            };
            let store = RetrievalStore::build(&pairs, bits, &config).unwrap();
            let store = RetrievalStore::from_bytes(&store.to_bytes()).unwrap();
            for &(h, v) in &pairs {
                prop_assert_eq!(store.query(h), v);
            }
            Ok(())
        },
    )?;
    run_proptest(
        "PHF serialization",
        (
            1usize..150,
            0.5f64..0.9,
            2.0f64..=3.0,
            0.0f64..=1.0,
            1usize..100,
            any::<u64>(),
            any::<bool>(),
            any::<bool>(),
        ),
        |(n, alpha, beta, x, bucket_size, seed, minimal, compressed)| {
            let keys: Vec<Vec<u8>> = (0..n)
                .map(|i| format!("{seed:x}/{i}").into_bytes())
                .collect();
            let config = PhfConfig::new(alpha, beta, x)
                .unwrap()
                .with_bucket_size(bucket_size)
                .with_seed(seed)
                .with_minimal(minimal)
                .with_compressed_metadata(compressed);
            let phf = SicHash::build(&keys, &config).unwrap();
            let bytes = phf.to_bytes();
            prop_assert_eq!(bytes.len() as u64 * 8, phf.bits_total() + FIXED_HEADER_BITS);
            let back = SicHash::from_bytes(&bytes).unwrap();
            prop_assert!(is_perfect(&back, &keys));
            for k in &keys {
                prop_assert_eq!(back.evaluate(k), phf.evaluate(k));
            }
            Ok(())
        },
    )?;
    Ok(format!(
        "Elias-Fano, Golomb-Rice, select1, retrieval, PHF serialization: {PROPTEST_CASES} cases each, {:.1}s",
        secs(t.elapsed())
    ))
}

fn throughput() -> Outcome {
    let keys = random_keys(1_000_000, 10);
    let config = PhfConfig::new(0.9, 2.0, 0.3).map_err(|e| e.to_string())?;
    let t = Instant::now();
    let phf = SicHash::build(&keys, &config).map_err(|e| e.to_string())?;
    let build = secs(t.elapsed());
    let t = Instant::now();
    let sum = keys
        .iter()
        .fold(0u64, |acc, k| acc.wrapping_add(phf.evaluate(k)));
    let query = secs(t.elapsed());
    std::hint::black_box(sum);
    Ok(format!(
        "informational only: build {:.2} MObjects/s, query {:.2} MQueries/s",
        1.0 / build,
        1.0 / query
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "perfection", perfection),
        (2, "minimal bijectivity", minimal_bijectivity),
        (3, "threshold solver", threshold_solver),
        (4, "overloading calibration", overload_calibration),
        (5, "configuration ordering", configuration_ordering),
        (6, "space accounting", space_accounting),
        (7, "small-case probability", small_case_probability),
        (8, "oracle implication", oracle_implication),
        (9, "codec roundtrips", codec_roundtrips),
        (10, "throughput", throughput),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut unexpected = Vec::new();
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| name.contains(f.as_str()) || f == &id.to_string())
        {
            continue;
        }
        let outcome = run();
        match &outcome {
            Ok(detail) => println!("PASS criterion {id:>2} {name}: {detail}"),
            Err(detail) => {
                let known = KNOWN_DEVIATIONS.contains(&id);
                println!(
                    "FAIL criterion {id:>2} {name}: {detail}{}",
                    if known { " [documented deviation]" } else { "" }
                );
                failed.push(id);
                if !known {
                    unexpected.push(id);
                }
            }
        }
    }
    println!(
        "acceptance: {} failed {:?}, {} unexpected",
        failed.len(),
        failed,
        unexpected.len()
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
