//! Univariate polynomials with exact rational coefficients.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::parse::parse_terms;
use crate::error::{Error, Result};
use crate::numerics::interval::RationalInterval;
use crate::numerics::rational::{format_rational, int, Rational};

/// `a_0 + a_1 x + ... + a_n x^n` with `n >= 1` and `a_n != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Result<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::Config("pattern polynomials must be non-constant".into()));
        }
        Ok(Polynomial { coeffs })
    }

    /// Like [`FromStr`], with the line number used in error reports.
    pub fn parse_line(text: &str, line: usize) -> Result<Self> {
        let mut coeffs: Vec<Rational> = Vec::new();
        for (powers, c) in parse_terms(text, line)? {
            let mut degree = 0usize;
            for (name, e) in powers {
                if name != "x" {
                    return Err(Error::Parse {
                        line,
                        column: text.find(&name).map_or(1, |i| i + 1),
                        message: format!("unknown variable {name:?}"),
                    });
                }
                degree += e as usize;
            }
            if coeffs.len() <= degree {
                coeffs.resize(degree + 1, Rational::zero());
            }
            coeffs[degree] += c;
        }
        Polynomial::new(coeffs).map_err(|e| Error::Parse {
            line,
            column: 1,
            message: e.to_string(),
        })
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn leading(&self) -> &Rational {
        self.coeffs.last().expect("non-constant")
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Rational) -> Rational {
        horner(&self.coeffs, x)
    }

    pub fn derivative_coeffs(&self) -> Vec<Rational> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * int(k as i64))
            .collect()
    }

    pub fn scaled(&self, k: &Rational) -> Vec<Rational> {
        self.coeffs.iter().map(|c| c * k).collect()
    }
}

pub fn horner(coeffs: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Enclosure of `Σ c_k x^k` over `x ⊆ [0, ∞)`, from the monotone split into
/// positive and negative coefficient parts.
pub fn eval_nonneg(coeffs: &[Rational], x: &RationalInterval) -> RationalInterval {
    debug_assert!(!x.lo().is_negative());
    let pos: Vec<Rational> = coeffs.iter().map(|c| c.max(&Rational::zero()).clone()).collect();
    let neg: Vec<Rational> = coeffs.iter().map(|c| (-c).max(Rational::zero())).collect();
    let lo = horner(&pos, x.lo()) - horner(&neg, x.hi());
    let hi = horner(&pos, x.hi()) - horner(&neg, x.lo());
    RationalInterval::new(lo, hi).expect("ordered split bounds")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let var = match k {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{k}"),
            };
            if k == 0 {
                f.write_str(&coef_text(&mag))?;
            } else if mag.is_one() {
                f.write_str(&var)?;
            } else {
                write!(f, "{}*{}", coef_text(&mag), var)?;
            }
        }
        Ok(())
    }
}

fn coef_text(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format_rational(x)
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Polynomial::parse_line(s, 1)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn parse_and_format() {
        let p: Polynomial = "x^3 - 5*x".parse().unwrap();
        assert_eq!(p.coeffs(), &[int(0), int(-5), int(0), int(1)]);
        assert_eq!(p.to_string(), "-5*x + x^3");
        let q: Polynomial = "1 + 2*x + 3/4*x^2".parse().unwrap();
        assert_eq!(q.to_string(), "1 + 2*x + 3/4*x^2");
        let r: Polynomial = "x*x + x".parse().unwrap();
        assert_eq!(r.degree(), 2);
    }

    #[test]
    fn rejects_constants_and_other_variables() {
        assert!("5".parse::<Polynomial>().is_err());
        assert!("x - x".parse::<Polynomial>().is_err());
        assert!(matches!(Polynomial::parse_line("y + 1", 3), Err(Error::Parse { line: 3, column: 1, .. })));
    }

    #[test]
    fn split_enclosure_contains_values() {
        let p: Polynomial = "x^3 - 5*x + 1".parse().unwrap();
        let x = RationalInterval::new(rat(1, 1), rat(3, 1)).unwrap();
        let e = eval_nonneg(p.coeffs(), &x);
        for k in 0..=20 {
            let t = rat(1, 1) + rat(k, 10);
            assert!(e.contains(&p.eval(&t)));
        }
    }

    proptest! {
        #[test]
        fn display_round_trips(c in proptest::collection::vec((-20i64..20, 1i64..6), 2..6)) {
            let coeffs: Vec<Rational> = c.iter().map(|&(n, d)| rat(n, d)).collect();
            if let Ok(p) = Polynomial::new(coeffs) {
                let back: Polynomial = p.to_string().parse().unwrap();
                prop_assert_eq!(back, p);
            }
        }
    }
}
