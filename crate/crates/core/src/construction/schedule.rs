//! Interleaving of grid levels among pattern maps: owner `i` with rank
//! `r(i)` gets the levels `(2k-1) 2^(r(i)-1)`, `k = 1, 2, ...`.

use serde::{Deserialize, Serialize};

use super::delta::{sqrt_enclosure, DeltaSequence};
use crate::error::{Error, Result};
use crate::numerics::rational::{int, pow2, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub m: u64,
    /// position of the owning map in the pattern
    pub owner: usize,
    pub k: u64,
}

/// First `depth` levels of the merged schedule; `ranks[i]` is `r(i)`.
pub fn schedule(ranks: &[u32], depth: usize) -> Result<Vec<ScheduleEntry>> {
    if ranks.is_empty() {
        return Err(Error::Config("schedule needs at least one owner".into()));
    }
    for (i, r) in ranks.iter().enumerate() {
        if *r == 0 || *r > 62 {
            return Err(Error::Config(format!("owner rank {r} out of range")));
        }
        if ranks[..i].contains(r) {
            return Err(Error::Config(format!("duplicate owner rank {r}")));
        }
    }
    let mut next_k = vec![1u64; ranks.len()];
    let level = |r: u32, k: u64| (2 * k - 1) << (r - 1);
    let mut out = Vec::with_capacity(depth);
    while out.len() < depth {
        let (owner, m) = ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| (i, level(r, next_k[i])))
            .min_by_key(|&(_, m)| m)
            .expect("non-empty");
        out.push(ScheduleEntry {
            m,
            owner,
            k: next_k[owner],
        });
        next_k[owner] += 1;
    }
    Ok(out)
}

/// Levels `(2k-1) 2^(j-1)` for `k = 1..=truncation`.
pub fn owner_levels(j: u32, truncation: usize) -> Vec<u64> {
    (1..=truncation as u64).map(|k| (2 * k - 1) << (j - 1)).collect()
}

/// Exponent differences below this are replaced by it; `2^-FLOOR` is still
/// an upper bound of the true ratio.
const FLOOR: i64 = 4096;

/// Checks `√N_up (δ_{m'-1}/(4L √N_lo) + δ_{m'}) <= δ_m/(2L)` for every
/// consecutive pair of scheduled levels. Returns the index of the first
/// failing pair.
pub fn check_nesting_fit(seq: &DeltaSequence, entries: &[ScheduleEntry]) -> std::result::Result<(), usize> {
    let root = sqrt_enclosure(seq.N());
    let l = int(seq.L() as i64);
    let ratio = |from: usize, to: usize| -> Rational {
        // δ_to / δ_from as 2^(e_from - e_to)
        let d = seq.exponent(from) - seq.exponent(to);
        pow2(d.max(-FLOOR))
    };
    for (idx, w) in entries.windows(2).enumerate() {
        let (m, m2) = (w[0].m as usize, w[1].m as usize);
        if m2 > seq.depth() || m2 <= m {
            return Err(idx);
        }
        let lhs = root.hi() * (ratio(m, m2 - 1) / (int(4) * &l * root.lo()) + ratio(m, m2));
        if lhs > int(1) / (int(2) * &l) {
            return Err(idx);
        }
    }
    Ok(())
}
