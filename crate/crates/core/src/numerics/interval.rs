//! Closed intervals with exact rational endpoints.
//!
//! Every operation returns an interval containing the exact image set; with
//! rational endpoints the four basic operations need no rounding at all.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, int, parse_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    lo: Rational,
    hi: Rational,
}

impl RationalInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!(
                "interval endpoints out of order: [{}, {}]",
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
        Ok(RationalInterval { lo, hi })
    }

    /// Builds `[min(a,b), max(a,b)]`.
    pub fn hull(a: Rational, b: Rational) -> Self {
        if a <= b {
            RationalInterval { lo: a, hi: b }
        } else {
            RationalInterval { lo: b, hi: a }
        }
    }

    pub fn point(x: Rational) -> Self {
        RationalInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn into_bounds(self) -> (Rational, Rational) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &RationalInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Both endpoint inequalities strict.
    pub fn is_strict_subset_of(&self, other: &RationalInterval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn intersect(&self, other: &RationalInterval) -> Option<RationalInterval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(RationalInterval { lo, hi })
    }

    pub fn overlaps(&self, other: &RationalInterval) -> bool {
        self.intersect(other).is_some()
    }

    pub fn scale(&self, k: &Rational) -> RationalInterval {
        RationalInterval::hull(&self.lo * k, &self.hi * k)
    }

    pub fn shift(&self, k: &Rational) -> RationalInterval {
        RationalInterval {
            lo: &self.lo + k,
            hi: &self.hi + k,
        }
    }

    /// Interval power with non-negative integer exponent.
    pub fn powi(&self, n: u32) -> RationalInterval {
        if n == 0 {
            return RationalInterval::point(int(1));
        }
        let a = num_traits::pow(self.lo.clone(), n as usize);
        let b = num_traits::pow(self.hi.clone(), n as usize);
        if n % 2 == 1 || !self.lo.is_negative() {
            RationalInterval { lo: a, hi: b }
        } else if !self.hi.is_positive() {
            RationalInterval { lo: b, hi: a }
        } else {
            RationalInterval {
                lo: Rational::zero(),
                hi: a.max(b),
            }
        }
    }

    pub fn abs(&self) -> RationalInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            RationalInterval::hull(-&self.hi, -&self.lo)
        } else {
            RationalInterval {
                lo: Rational::zero(),
                hi: (-&self.lo).max(self.hi.clone()),
            }
        }
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            format_rational(&self.lo),
            format_rational(&self.hi)
        )
    }
}

impl Serialize for RationalInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq([format_rational(&self.lo), format_rational(&self.hi)])
    }
}

impl<'de> Deserialize<'de> for RationalInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        let lo = parse_rational(&lo).map_err(serde::de::Error::custom)?;
        let hi = parse_rational(&hi).map_err(serde::de::Error::custom)?;
        RationalInterval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

pub fn iv_add(a: &RationalInterval, b: &RationalInterval) -> RationalInterval {
    RationalInterval {
        lo: &a.lo + &b.lo,
        hi: &a.hi + &b.hi,
    }
}

pub fn iv_sub(a: &RationalInterval, b: &RationalInterval) -> RationalInterval {
    RationalInterval {
        lo: &a.lo - &b.hi,
        hi: &a.hi - &b.lo,
    }
}

pub fn iv_mul(a: &RationalInterval, b: &RationalInterval) -> RationalInterval {
    let products = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
    let lo = products.iter().min().unwrap().clone();
    let hi = products.iter().max().unwrap().clone();
    RationalInterval { lo, hi }
}

pub fn iv_div(a: &RationalInterval, b: &RationalInterval) -> Result<RationalInterval> {
    if b.contains_zero() {
        return Err(Error::Domain(format!("division by interval {b} containing zero")));
    }
    let inv = RationalInterval {
        lo: b.hi.recip(),
        hi: b.lo.recip(),
    };
    Ok(iv_mul(a, &inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rat;

    fn iv(a: i64, b: i64) -> RationalInterval {
        RationalInterval::new(int(a), int(b)).unwrap()
    }

    #[test]
    fn basic_examples() {
        assert_eq!(iv_mul(&iv(1, 2), &iv(3, 4)), iv(3, 8));
        let ab = RationalInterval::new(rat(-1, 3), rat(5, 7)).unwrap();
        assert_eq!(iv_add(&iv(0, 0), &ab), ab);
        assert_eq!(
            iv_div(&iv(1, 1), &iv(2, 4)).unwrap(),
            RationalInterval::new(rat(1, 4), rat(1, 2)).unwrap()
        );
    }

    #[test]
    fn division_by_zero_interval_is_domain_error() {
        assert!(matches!(iv_div(&iv(1, 1), &iv(-1, 1)), Err(Error::Domain(_))));
        assert!(matches!(iv_div(&iv(1, 1), &iv(0, 0)), Err(Error::Domain(_))));
    }

    #[test]
    fn reversed_endpoints_rejected() {
        assert!(RationalInterval::new(int(2), int(1)).is_err());
    }

    #[test]
    fn even_power_straddling_zero() {
        assert_eq!(iv(-3, 2).powi(2), iv(0, 9));
        assert_eq!(iv(-3, -2).powi(2), iv(4, 9));
        assert_eq!(iv(-3, 2).powi(3), iv(-27, 8));
    }

    #[test]
    fn serde_as_string_pair() {
        let x = RationalInterval::new(rat(1, 4), rat(1, 2)).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"["1/4","1/2"]"#);
        let back: RationalInterval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<RationalInterval>(r#"["1/1","0/1"]"#).is_err());
    }
}
