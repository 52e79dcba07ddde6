use crate::error::{Error, Result};
use crate::succinct::EliasFano;

/// Remap table for values in `[n, m)`.
///
/// Entry `v - n` is the hole of `[0, n)` assigned to the occupied value `v`.
/// Holes are handed out in increasing order to occupied values in increasing
/// order, so the sequence is monotone. Unoccupied values repeat the next
/// hole (or the last one) and are never queried for keys of the set.
pub(crate) fn build_remap(values: &[u64], n: u64, m: u64) -> Result<Vec<u64>> {
    if values.len() as u64 != n || m < n {
        return Err(Error::InvalidValue(format!(
            "{} values for {n} keys in range {m}",
            values.len()
        )));
    }
    let mut occupied = vec![false; m as usize];
    for &v in values {
        let slot = occupied
            .get_mut(v as usize)
            .ok_or_else(|| Error::InvalidValue(format!("value {v} outside range {m}")))?;
        if std::mem::replace(slot, true) {
            return Err(Error::InvalidValue(format!("value {v} is hit twice")));
        }
    }
    let holes: Vec<u64> = (0..n).filter(|&v| !occupied[v as usize]).collect();
    let mut next = 0;
    let mut remap = Vec::with_capacity((m - n) as usize);
    for v in n..m {
        let hole = holes.get(next).or(holes.last()).copied().unwrap_or(0);
        if occupied[v as usize] {
            next += 1;
        }
        remap.push(hole);
    }
    debug_assert_eq!(next, holes.len());
    Ok(remap)
}

pub(crate) fn build_remap_ef(values: &[u64], n: u64, m: u64) -> Result<EliasFano> {
    EliasFano::new(&build_remap(values, n, m)?)
}
