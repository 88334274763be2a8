//! Affine maps `f(x) = s x + b` and their linear conjugators `ψ(x) = λ x`.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::rational::{floor_log2, int, pow2, rational_str, Dyadic, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(with = "rational_str")]
    pub slope: Rational,
    #[serde(with = "rational_str")]
    pub intercept: Rational,
    /// `λ`, once conjugated
    pub lambda: Option<Dyadic>,
}

impl AffineMap {
    pub fn new(slope: Rational, intercept: Rational) -> Result<Self> {
        if slope.is_zero() {
            return Err(Error::Config("affine map needs a non-zero slope".into()));
        }
        Ok(AffineMap {
            slope,
            intercept,
            lambda: None,
        })
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    /// Solves `f(x) = y`.
    pub fn solve(&self, y: &Rational) -> Rational {
        (y - &self.intercept) / &self.slope
    }
}

/// Picks `λ = 2^k`, the least power of two with `|s| λ >= 1`; then
/// `1 <= |s| λ < 2 <= L`.
pub fn conjugate_bilipschitz(f: &AffineMap, l: u32) -> Result<AffineMap> {
    if f.slope.is_zero() {
        return Err(Error::Config("affine map needs a non-zero slope".into()));
    }
    if l < 2 {
        return Err(Error::Config("L must be at least 2".into()));
    }
    let inv = f.slope.abs().recip();
    let mut k = floor_log2(&inv);
    if pow2(k) < inv {
        k += 1;
    }
    let lambda = Dyadic::pow2(k);
    let stretch = f.slope.abs() * lambda.to_rational();
    debug_assert!(stretch >= int(1) && stretch <= int(l as i64));
    Ok(AffineMap {
        lambda: Some(lambda),
        ..f.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rat;

    fn lambda(slope: Rational) -> Rational {
        let f = AffineMap::new(slope, int(0)).unwrap();
        conjugate_bilipschitz(&f, 2).unwrap().lambda.unwrap().to_rational()
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(lambda(int(1)), int(1));
        assert_eq!(lambda(rat(1, 3)), int(4));
        assert_eq!(lambda(int(5)), rat(1, 4));
        assert_eq!(lambda(rat(-1, 2)), int(2));
    }

    #[test]
    fn zero_slope_rejected() {
        assert!(matches!(AffineMap::new(int(0), int(1)), Err(Error::Config(_))));
    }

    #[test]
    fn stretch_in_range() {
        for n in 1..60 {
            for d in 1..20 {
                let s = rat(n, d);
                let st = &s * lambda(s.clone());
                assert!(st >= int(1) && st < int(2));
            }
        }
    }
}
