use std::collections::HashSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MIN_KEY_LEN: usize = 10;
pub const MAX_KEY_LEN: usize = 50;

/// `count` distinct random keys, lengths uniform in `[10, 50]` and bytes
/// uniform in `[1, 255]` without the newline byte.
pub fn generate(count: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(count);
    let mut keys = Vec::with_capacity(count);
    while keys.len() < count {
        let len = rng.gen_range(MIN_KEY_LEN..=MAX_KEY_LEN);
        let key: Vec<u8> = (0..len)
            .map(|_| loop {
                let b = rng.gen_range(1..=255u8);
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

pub fn write(path: &Path, keys: &[Vec<u8>]) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    for k in keys {
        out.write_all(k)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a newline-delimited key file. A final newline is optional.
pub fn read(path: &Path) -> Result<Vec<Vec<u8>>> {
    let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines: Vec<&[u8]> = data.split(|&b| b == b'\n').collect();
    if lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    if lines.is_empty() {
        bail!("{} contains no keys", path.display());
    }
    Ok(lines.into_iter().map(<[u8]>::to_vec).collect())
}

/// Printable form of a key for messages.
pub fn show(key: &[u8]) -> String {
    format!("{:?}", String::from_utf8_lossy(key))
}
