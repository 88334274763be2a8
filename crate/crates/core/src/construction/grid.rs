//! Level-`n` grids: equally spaced closed intervals of length `δ_n` on `[0, ∞)`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::delta::{sqrt_enclosure, DeltaSequence};
use crate::error::{Error, Result};
use crate::numerics::interval::RationalInterval;
use crate::numerics::rational::{int, rational_str, Dyadic, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridLevel {
    pub n: usize,
    pub delta: Dyadic,
    #[serde(with = "rational_str")]
    pub gap: Rational,
    #[serde(with = "rational_str")]
    pub period: Rational,
    #[serde(with = "rational_str")]
    pub offset: Rational,
}

pub fn grid_level(seq: &DeltaSequence, n: usize) -> Result<GridLevel> {
    if n == 0 || n > seq.depth() {
        return Err(Error::Index {
            index: n,
            len: seq.deltas().len(),
        });
    }
    let s_lo = sqrt_enclosure(seq.N()).lo().clone();
    let gap = seq.delta(n - 1)? / (int(4 * seq.L() as i64) * s_lo);
    let delta = seq.deltas()[n].clone();
    let period = delta.to_rational() + &gap;
    Ok(GridLevel {
        n,
        delta,
        gap,
        period,
        offset: Rational::zero(),
    })
}

impl GridLevel {
    pub fn delta_rational(&self) -> Rational {
        self.delta.to_rational()
    }

    /// Interval `k >= 0`.
    pub fn interval(&self, k: &BigInt) -> RationalInterval {
        let lo = &self.offset + Rational::from_integer(k.clone()) * &self.period;
        let hi = &lo + self.delta_rational();
        RationalInterval::new(lo, hi).expect("positive length")
    }

    /// Smallest `k >= 0` whose left endpoint is strictly above `x`.
    pub fn first_starting_above(&self, x: &Rational) -> BigInt {
        let q: BigInt = ((x - &self.offset) / &self.period).floor().to_integer();
        (q + 1u32).max(BigInt::zero())
    }

    /// Smallest `k >= 0` whose left endpoint is at least `x`.
    pub fn first_starting_at_or_above(&self, x: &Rational) -> BigInt {
        let q = ((x - &self.offset) / &self.period).ceil().to_integer();
        q.max(BigInt::zero())
    }

    /// Range `k_lo..=k_hi` of intervals meeting `window`, if any.
    pub fn indices_meeting(&self, window: &RationalInterval) -> Option<(BigInt, BigInt)> {
        if window.hi() < &self.offset {
            return None;
        }
        // interval k meets the window iff k p + δ >= lo and k p <= hi
        let lo = ((window.lo() - &self.offset - self.delta_rational()) / &self.period)
            .ceil()
            .to_integer()
            .max(BigInt::zero());
        let hi = ((window.hi() - &self.offset) / &self.period).floor().to_integer();
        (lo <= hi).then_some((lo, hi))
    }

    /// Number of intervals meeting `window`.
    pub fn count_meeting(&self, window: &RationalInterval) -> BigInt {
        match self.indices_meeting(window) {
            Some((lo, hi)) => hi - lo + 1,
            None => BigInt::zero(),
        }
    }

    /// Index of the interval containing `x`, if `x` lies on the grid.
    pub fn locate(&self, x: &Rational) -> Option<BigInt> {
        let rel = x - &self.offset;
        if rel.is_negative() {
            return None;
        }
        let k = (&rel / &self.period).floor().to_integer();
        let start = Rational::from_integer(k.clone()) * &self.period;
        (rel - start <= self.delta_rational()).then_some(k)
    }

    /// Whether `c` is exactly one of this level's intervals; returns its index.
    pub fn index_of(&self, c: &RationalInterval) -> Option<BigInt> {
        let rel = c.lo() - &self.offset;
        let q = &rel / &self.period;
        if !q.is_integer() || q.is_negative() {
            return None;
        }
        let k = q.to_integer();
        (self.interval(&k) == *c).then_some(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimfun::DimensionFunction;
    use crate::numerics::rational::{pow2, rat};
    use num_bigint::BigUint;

    fn seq(l: u32, n: u32, exps: &[i64]) -> DeltaSequence {
        let h: DimensionFunction = "pow:1/2".parse().unwrap();
        DeltaSequence::from_parts(h, l, n, exps.iter().map(|&e| Dyadic::pow2(-e)).collect()).unwrap()
    }

    #[test]
    fn plug_in_level_one() {
        let g = grid_level(&seq(2, 1, &[0, 3]), 1).unwrap();
        assert_eq!(g.delta_rational(), rat(1, 8));
        assert_eq!(g.gap, rat(1, 8));
        assert_eq!(g.period, rat(1, 4));
        assert_eq!(g.interval(&3.into()), RationalInterval::new(rat(3, 4), rat(7, 8)).unwrap());
    }

    #[test]
    fn out_of_range_level() {
        let s = seq(2, 1, &[0, 3]);
        assert!(matches!(grid_level(&s, 2), Err(Error::Index { .. })));
        assert!(matches!(grid_level(&s, 0), Err(Error::Index { .. })));
    }

    #[test]
    fn count_on_unit_interval() {
        let s = seq(2, 1, &[0, 3, 7, 12]);
        for n in 1..=3 {
            let g = grid_level(&s, n).unwrap();
            let c = g.count_meeting(&RationalInterval::new(rat(0, 1), rat(1, 1)).unwrap());
            let f = (rat(1, 1) / &g.period).floor().to_integer();
            assert!(c == f || c == &f + 1, "level {n}: {c} vs {f}");
        }
    }

    #[test]
    fn gap_with_two_dimensions() {
        let s = seq(2, 2, &[0, 4, 9]);
        // independent lower bound of √2 from an integer square root at 2^-100
        let scaled = BigUint::from(2u32) << 200u32;
        let root = scaled.sqrt();
        let sqrt2_lo = Rational::new(BigInt::from(root), BigInt::from(1) << 100u32);
        for n in 1..=2 {
            let g = grid_level(&s, n).unwrap();
            assert!(&g.gap * int(8) * &sqrt2_lo >= s.delta(n - 1).unwrap());
        }
    }

    #[test]
    fn locate_and_index() {
        let g = grid_level(&seq(2, 1, &[0, 3]), 1).unwrap();
        assert_eq!(g.locate(&rat(13, 16)), Some(3.into()));
        assert_eq!(g.locate(&rat(15, 16)), None);
        assert_eq!(g.index_of(&g.interval(&5.into())), Some(5.into()));
        assert_eq!(g.index_of(&RationalInterval::new(rat(1, 4), rat(1, 2)).unwrap()), None);
        assert_eq!(g.first_starting_above(&rat(1, 4)), 2.into());
        assert_eq!(g.first_starting_at_or_above(&rat(1, 4)), 1.into());
        assert_eq!(g.first_starting_above(&-pow2(3)), 0.into());
    }
}
