//! Finite truncations of `K_j = ⋂_k F_{(2k-1) 2^(j-1)}` inside a window.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::delta::DeltaSequence;
use super::grid::grid_level;
use super::schedule::owner_levels;
use crate::error::{Error, Result};
use crate::numerics::interval::RationalInterval;

/// Refuses to materialize more than this many intervals.
pub const MAX_INTERVALS: usize = 1 << 20;

pub fn kset_intervals(
    seq: &DeltaSequence,
    j: u32,
    truncation: usize,
    window: &RationalInterval,
) -> Result<Vec<RationalInterval>> {
    if j == 0 || j > 62 {
        return Err(Error::Config(format!("owner level {j} out of range")));
    }
    if truncation == 0 {
        return Err(Error::Config("truncation must be at least 1".into()));
    }
    let levels = owner_levels(j, truncation);
    if let Some(&top) = levels.last() {
        if top as usize > seq.depth() {
            return Err(Error::Index {
                index: top as usize,
                len: seq.deltas().len(),
            });
        }
    }
    let mut current = vec![window.clone()];
    for m in levels {
        let g = grid_level(seq, m as usize)?;
        let mut next = Vec::new();
        for piece in &current {
            let Some((lo, hi)) = g.indices_meeting(piece) else {
                continue;
            };
            let count = (&hi - &lo + 1u32).to_usize().unwrap_or(usize::MAX);
            if count > MAX_INTERVALS || next.len() + count > MAX_INTERVALS {
                return Err(Error::Config("window too wide for this truncation".into()));
            }
            let mut k: BigInt = lo;
            while k <= hi {
                if let Some(c) = g.interval(&k).intersect(piece) {
                    next.push(c);
                }
                k += 1u32;
            }
        }
        current = next;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimfun::DimensionFunction;
    use crate::numerics::rational::{rat, Dyadic, Rational};

    fn seq() -> DeltaSequence {
        let h: DimensionFunction = "pow:1/2".parse().unwrap();
        DeltaSequence::from_parts(h, 2, 1, [0, 3, 7, 12].iter().map(|&e| Dyadic::pow2(-e)).collect()).unwrap()
    }

    fn unit() -> RationalInterval {
        RationalInterval::new(rat(0, 1), rat(1, 1)).unwrap()
    }

    #[test]
    fn single_level_is_grid() {
        let s = seq();
        let got = kset_intervals(&s, 1, 1, &unit()).unwrap();
        let g = grid_level(&s, 1).unwrap();
        // four full intervals and the touching point at 1
        assert_eq!(got.len(), 5);
        for (k, c) in got.iter().take(4).enumerate() {
            assert_eq!(c, &g.interval(&k.into()));
        }
        assert!(got[4].is_point());
    }

    #[test]
    fn window_below_zero_is_empty() {
        let w = RationalInterval::new(rat(-3, 1), rat(-1, 1)).unwrap();
        assert!(kset_intervals(&seq(), 1, 1, &w).unwrap().is_empty());
    }

    #[test]
    fn too_deep_is_index_error() {
        assert!(matches!(kset_intervals(&seq(), 2, 2, &unit()), Err(Error::Index { .. })));
    }

    #[test]
    fn matches_rasterized_intersection() {
        // mesh midpoints (2i+1)/2^21 in integer units of 2^-21; level n has
        // length 2^(21-e_n) and period length + 2^(21-e_{n-1})/8
        let s = seq();
        let got = kset_intervals(&s, 1, 2, &unit()).unwrap();
        let exps = [0u32, 3, 7, 12];
        let member = |x: u64, n: usize| {
            let len = 1u64 << (21 - exps[n]);
            let period = len + (1u64 << (21 - exps[n - 1])) / 8;
            x % period <= len
        };
        let scale = Rational::from_integer((1u64 << 21).into());
        let units: Vec<(u64, u64)> = got
            .iter()
            .map(|c| {
                let lo = c.lo() * &scale;
                let hi = c.hi() * &scale;
                assert!(lo.is_integer() && hi.is_integer());
                (lo.to_integer().try_into().unwrap(), hi.to_integer().try_into().unwrap())
            })
            .collect();
        let mut raster = 0u64;
        let mut by_list = 0u64;
        for i in 0..(1u64 << 20) {
            let x = 2 * i + 1;
            if member(x, 1) && member(x, 3) {
                raster += 1;
            }
            if units.iter().any(|&(lo, hi)| lo <= x && x <= hi) {
                by_list += 1;
            }
        }
        assert_eq!(raster, by_list);
        assert!(raster > 0);
    }

    #[test]
    fn deeper_truncation_refines() {
        let h: DimensionFunction = "pow:1/2".parse().unwrap();
        let s = DeltaSequence::from_parts(h, 2, 1, (0..=5).map(|i| Dyadic::pow2(-3 * i)).collect()).unwrap();
        let w = RationalInterval::new(rat(1, 3), rat(7, 4)).unwrap();
        let coarse = kset_intervals(&s, 1, 2, &w).unwrap();
        let fine = kset_intervals(&s, 1, 3, &w).unwrap();
        assert!(!fine.is_empty());
        for c in &fine {
            assert!(coarse.iter().any(|b| c.is_subset_of(b)));
        }
    }
}
