//! Exact scalars: arbitrary precision rationals and dyadics, plus the
//! `"numerator/denominator"` text form used in every JSON output.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^e` for any sign of `e`.
pub fn pow2(e: i64) -> Rational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Always `"n/d"`, including `"n/1"` for integers.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |msg: &str| Error::Parse {
        line: 1,
        column: 1,
        message: format!("{msg}: {s:?}"),
    };
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad("invalid numerator"))?;
    let d = BigInt::from_str(d).map_err(|_| bad("invalid denominator"))?;
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Floor of the base-2 logarithm of a positive rational.
pub fn floor_log2(x: &Rational) -> i64 {
    debug_assert!(x.is_positive());
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let mut k = nb - db;
    // 2^k is within a factor 2 of x; correct by one step either way.
    if x < &pow2(k) {
        k -= 1;
    } else if x >= &pow2(k + 1) {
        k += 1;
    }
    k
}

/// Largest multiple of `2^-bits` not above `x`.
pub fn round_down(x: &Rational, bits: u64) -> Rational {
    let scale = BigInt::one() << bits;
    Rational::new((x * Rational::from_integer(scale.clone())).floor().to_integer(), scale)
}

/// Smallest multiple of `2^-bits` not below `x`.
pub fn round_up(x: &Rational, bits: u64) -> Rational {
    let scale = BigInt::one() << bits;
    Rational::new((x * Rational::from_integer(scale.clone())).ceil().to_integer(), scale)
}

/// A dyadic rational `mantissa * 2^exponent`, kept canonical (odd or zero mantissa).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Dyadic {
                mantissa,
                exponent: 0,
            };
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Dyadic {
            mantissa: mantissa >> tz,
            exponent: exponent + tz as i64,
        }
    }

    pub fn pow2(exponent: i64) -> Self {
        Dyadic::new(BigInt::one(), exponent)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from_integer(self.mantissa.clone()) * pow2(self.exponent)
    }

    /// Exact conversion; fails when the denominator is not a power of two.
    pub fn from_rational(x: &Rational) -> Option<Self> {
        let d = x.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz) != BigInt::one() {
            return None;
        }
        Some(Dyadic::new(x.numer().clone(), -(tz as i64)))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 1,
            column: 1,
            message: format!("invalid dyadic {s:?}, expected \"m*2^e\""),
        };
        let (m, e) = s.trim().split_once("*2^").ok_or_else(bad)?;
        let m = BigInt::from_str(m).map_err(|_| bad())?;
        let e = e.parse::<i64>().map_err(|_| bad())?;
        Ok(Dyadic::new(m, e))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A dyadic strictly inside `(lo, hi)` with a denominator no finer than
/// needed. Used as the bisection midpoint so endpoints stay dyadic.
pub fn dyadic_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo < hi);
    let w = hi - lo;
    // 2^-k <= w/4
    let k = 2 - floor_log2(&w);
    let scale = pow2(k);
    let mid = (lo + hi) / int(2);
    let j = (&mid * &scale).floor();
    let cand = j / scale;
    if &cand > lo && &cand < hi {
        cand
    } else {
        mid
    }
}

/// `serde(with = ...)` adapter for a single rational as `"n/d"`.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// `serde(with = ...)` adapter for a list of rationals.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// `serde(with = ...)` adapter for big integers as decimal strings.
pub mod bigint_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

pub fn gcd_normalized(x: &Rational) -> bool {
    x.denom().is_positive() && x.numer().gcd(x.denom()).is_one()
}
