//! Dimension functions and their certified evaluation on `[0, 1]`.
//!
//! Catalog:
//! * `pow:a`: `x^a`;
//! * `loginv`: `1/ln(1/x)` on `(0, 1/e]`, continued as `1 + (x - 1/e)`;
//! * `powlog:a:b`: `x^a (ln(1/x))^b` on `(0, 1/e]` (`b <= 0`), continued
//!   as `e^-a + (x - 1/e)`.
//!
//! All of them vanish at 0 and are non-decreasing on `[0, 1]`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::elementary::{exp_enclosure, inv_e_enclosure, ln2_enclosure, ln_enclosure, log2_enclosure};
use crate::numerics::interval::{iv_div, iv_mul, RationalInterval};
use crate::numerics::rational::{floor_log2, format_rational, int, parse_rational, pow2, Rational};
use crate::numerics::roots::nth_root_bracket;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DimKind {
    Power(Rational),
    LogInverse,
    PowerLog(Rational, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionFunction {
    kind: DimKind,
    label: String,
}

/// Precision (bits) used for the logarithm bounds of tiny arguments.
const LOG_BITS: u64 = 96;

impl DimensionFunction {
    pub fn power(alpha: Rational) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::Config("power exponent must be positive".into()));
        }
        let label = format!("pow:{}", short(&alpha));
        Ok(DimensionFunction {
            kind: DimKind::Power(alpha),
            label,
        })
    }

    pub fn log_inverse() -> Self {
        DimensionFunction {
            kind: DimKind::LogInverse,
            label: "loginv".into(),
        }
    }

    pub fn power_log(alpha: Rational, beta: i64) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::Config("power exponent must be positive".into()));
        }
        if beta > 0 {
            // x^a (ln 1/x)^b is not monotone near 1/e once b > a
            return Err(Error::Config("powlog needs a non-positive log exponent".into()));
        }
        let label = format!("powlog:{}:{}", short(&alpha), beta);
        Ok(DimensionFunction {
            kind: DimKind::PowerLog(alpha, beta),
            label,
        })
    }

    pub fn kind(&self) -> &DimKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Enclosure of `h(x)` for a single `x` in `[0, 1]`, width at most `tol`.
    pub fn enclose(&self, x: &Rational, tol: &Rational) -> Result<RationalInterval> {
        if x.is_negative() || x > &Rational::one() {
            return Err(Error::Domain(format!(
                "dimension function evaluated outside [0,1] at {}",
                format_rational(x)
            )));
        }
        if !tol.is_positive() {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        if x.is_zero() {
            return Ok(RationalInterval::point(Rational::zero()));
        }
        let mut bits = (-floor_log2(tol)).max(0) as u64 + 24;
        for _ in 0..8 {
            let e = self.enclose_at_bits(x, bits, tol)?;
            if &e.width() <= tol {
                return Ok(e);
            }
            bits *= 2;
        }
        Err(Error::Certification {
            step: 0,
            reason: format!("could not enclose {} to tolerance", self.label),
        })
    }

    fn enclose_at_bits(&self, x: &Rational, bits: u64, tol: &Rational) -> Result<RationalInterval> {
        let eps = pow2(-(bits as i64));
        match &self.kind {
            DimKind::Power(alpha) => {
                let p = alpha.numer().to_usize().ok_or_else(|| Error::Config("exponent too large".into()))?;
                let q = alpha.denom().to_u32().ok_or_else(|| Error::Config("exponent too large".into()))?;
                nth_root_bracket(&num_traits::pow(x.clone(), p), q, &tol.min(&eps).clone())
            }
            DimKind::LogInverse | DimKind::PowerLog(..) => {
                let inv_e = inv_e_enclosure(bits);
                if x < inv_e.lo() {
                    self.near_zero(x, bits)
                } else if x > inv_e.hi() {
                    let at = self.at_inv_e(bits)?;
                    Ok(RationalInterval::hull(
                        at.lo() + x - inv_e.hi(),
                        at.hi() + x - inv_e.lo(),
                    ))
                } else {
                    let lo = self.near_zero(inv_e.lo(), bits)?;
                    let at = self.at_inv_e(bits)?;
                    Ok(RationalInterval::hull(lo.lo().clone(), at.hi() + inv_e.width()))
                }
            }
        }
    }

    /// `h(1/e)` for the logarithmic kinds.
    fn at_inv_e(&self, bits: u64) -> Result<RationalInterval> {
        match &self.kind {
            DimKind::PowerLog(alpha, _) => exp_enclosure(&-alpha, bits),
            _ => Ok(RationalInterval::point(int(1))),
        }
    }

    /// Formula branch on `(0, 1/e)`.
    fn near_zero(&self, x: &Rational, bits: u64) -> Result<RationalInterval> {
        let ln = ln_enclosure(&x.recip(), bits)?;
        let one = RationalInterval::point(int(1));
        match &self.kind {
            DimKind::LogInverse => iv_div(&one, &ln),
            DimKind::PowerLog(alpha, beta) => {
                let p = alpha.numer().to_usize().ok_or_else(|| Error::Config("exponent too large".into()))?;
                let q = alpha.denom().to_u32().ok_or_else(|| Error::Config("exponent too large".into()))?;
                let root = nth_root_bracket(&num_traits::pow(x.clone(), p), q, &pow2(-(bits as i64)))?;
                let log_part = iv_div(&one, &ln.powi(beta.unsigned_abs() as u32))?;
                Ok(iv_mul(&root, &log_part))
            }
            DimKind::Power(_) => unreachable!("power kind has no log branch"),
        }
    }

    /// Certified `u >= h(x)` for all `x` in `t ⊆ [0,1]`, with `u <= h(t.hi) + tol`.
    pub fn h_upper(&self, t: &RationalInterval, tol: &Rational) -> Result<Rational> {
        if t.lo().is_negative() || t.hi() > &Rational::one() {
            return Err(Error::Domain(format!("argument {t} outside [0,1]")));
        }
        Ok(self.enclose(t.hi(), tol)?.hi().clone())
    }

    /// Certified upper bound of `log2 h(j * 2^-e)`, valid for any size of
    /// `e` with cost independent of it.
    pub fn log2_upper_dyadic(&self, bound: &SmallFactor, e: i64) -> Result<Rational> {
        let j = bound.value;
        // x = j 2^-e; the log-domain formulas need x well below 1/e
        if e < bound.bits + 64 {
            if e < bound.bits - 1 && Rational::from_integer(j.into()) * pow2(-e) > Rational::one() {
                return Err(Error::Domain("argument above 1".into()));
            }
            let x = Rational::from_integer(j.into()) * pow2(-e);
            if x > Rational::one() {
                return Err(Error::Domain("argument above 1".into()));
            }
            let u = self.h_upper(&RationalInterval::point(x.clone()), &(&x * &x * pow2(-100)))?;
            return Ok(log2_enclosure(&u, LOG_BITS)?.hi().clone());
        }
        let power_part = |alpha: &Rational| alpha * (&bound.log2_hi - int(e));
        let log_log_lo = || -> Result<Rational> {
            // ln(1/x) = e ln2 - ln j >= e ln2_lo - ln_j_hi
            let ell = int(e) * &bound.ln2_lo - &bound.ln_hi;
            Ok(log2_enclosure(&ell, LOG_BITS)?.lo().clone())
        };
        match &self.kind {
            DimKind::Power(alpha) => Ok(power_part(alpha)),
            DimKind::LogInverse => Ok(-log_log_lo()?),
            DimKind::PowerLog(alpha, beta) => Ok(power_part(alpha) + int(*beta) * log_log_lo()?),
        }
    }
}

/// Cached logarithm bounds of a small positive integer factor `j`, used by
/// [`DimensionFunction::log2_upper_dyadic`].
#[derive(Clone, Debug)]
pub struct SmallFactor {
    value: u64,
    bits: i64,
    log2_hi: Rational,
    ln_hi: Rational,
    ln2_lo: Rational,
}

impl SmallFactor {
    pub fn new(j: u64) -> Result<Self> {
        if j == 0 {
            return Err(Error::Domain("factor must be positive".into()));
        }
        let r = int(j as i64);
        Ok(SmallFactor {
            value: j,
            bits: 64 - j.leading_zeros() as i64,
            log2_hi: log2_enclosure(&r, LOG_BITS)?.hi().clone(),
            ln_hi: ln_enclosure(&r, LOG_BITS)?.hi().clone(),
            ln2_lo: ln2_enclosure(LOG_BITS).lo().clone(),
        })
    }
}

/// Numerical evidence about the order `h2 ≺ h1`.
#[derive(Clone, Debug)]
pub struct OrderingEvidence {
    pub ratios: Vec<RationalInterval>,
    /// Ratio upper bounds strictly decreasing and the last one below 10^-3.
    pub consistent: bool,
}

/// Encloses `h1(x)/h2(x)` at decreasing probes.
pub fn h_compare(
    h1: &DimensionFunction,
    h2: &DimensionFunction,
    probes: &[Rational],
) -> Result<OrderingEvidence> {
    if probes.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("probes must be strictly decreasing".into()));
    }
    if probes.iter().any(|x| !x.is_positive() || x > &Rational::one()) {
        return Err(Error::Domain("probes must lie in (0,1]".into()));
    }
    let mut ratios = Vec::with_capacity(probes.len());
    for x in probes {
        let a = relative_enclosure(h1, x)?;
        let b = relative_enclosure(h2, x)?;
        ratios.push(iv_div(&a, &b)?);
    }
    let decreasing = ratios.windows(2).all(|w| w[1].hi() < w[0].hi());
    let small = ratios
        .last()
        .is_some_and(|r| r.hi() < &Rational::new(1.into(), 1000.into()));
    Ok(OrderingEvidence {
        ratios,
        consistent: decreasing && small,
    })
}

/// Enclosure with relative width below 2^-40.
fn relative_enclosure(h: &DimensionFunction, x: &Rational) -> Result<RationalInterval> {
    let mut tol = pow2(-64);
    for _ in 0..16 {
        let e = h.enclose(x, &tol)?;
        if e.lo().is_positive() && e.width() <= e.lo() * pow2(-40) {
            return Ok(e);
        }
        tol *= pow2(-64);
    }
    Err(Error::Certification {
        step: 0,
        reason: format!("no relative enclosure of {} near zero", h.label()),
    })
}

fn short(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for DimensionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl FromStr for DimensionFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["pow", a] => DimensionFunction::power(parse_rational(a)?),
            ["loginv"] => Ok(DimensionFunction::log_inverse()),
            ["powlog", a, b] => {
                let beta = b
                    .trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Config(format!("invalid log exponent in {s:?}")))?;
                DimensionFunction::power_log(parse_rational(a)?, beta)
            }
            _ => Err(Error::Config(format!(
                "unknown dimension function {s:?} (expected pow:a, loginv or powlog:a:b)"
            ))),
        }
    }
}

impl Serialize for DimensionFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label)
    }
}

impl<'de> Deserialize<'de> for DimensionFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rat;
    use proptest::prelude::*;

    fn all() -> Vec<DimensionFunction> {
        ["pow:1/2", "pow:1/4", "pow:1", "pow:3/2", "loginv", "powlog:1/2:-1", "powlog:1:0"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect()
    }

    #[test]
    fn parses_catalog_syntax() {
        let h: DimensionFunction = "pow:1/2".parse().unwrap();
        assert_eq!(h.kind(), &DimKind::Power(rat(1, 2)));
        assert_eq!(h.to_string(), "pow:1/2");
        assert_eq!("loginv".parse::<DimensionFunction>().unwrap().kind(), &DimKind::LogInverse);
        let pl: DimensionFunction = "powlog:1/2:-1".parse().unwrap();
        assert_eq!(pl.kind(), &DimKind::PowerLog(rat(1, 2), -1));
        assert!("pow:-1".parse::<DimensionFunction>().is_err());
        assert!("powlog:1/2:2".parse::<DimensionFunction>().is_err());
        assert!("cosh".parse::<DimensionFunction>().is_err());
    }

    #[test]
    fn power_half_at_quarter_is_exact() {
        let h: DimensionFunction = "pow:1/2".parse().unwrap();
        let t = RationalInterval::point(rat(1, 4));
        assert_eq!(h.h_upper(&t, &pow2(-30)).unwrap(), rat(1, 2));
    }

    #[test]
    fn every_kind_vanishes_at_zero() {
        let zero = RationalInterval::point(int(0));
        for h in all() {
            assert_eq!(h.h_upper(&zero, &pow2(-10)).unwrap(), int(0), "{h}");
        }
    }

    #[test]
    fn outside_unit_interval_is_domain_error() {
        let h = DimensionFunction::log_inverse();
        let t = RationalInterval::new(int(0), rat(3, 2)).unwrap();
        assert!(matches!(h.h_upper(&t, &pow2(-10)), Err(Error::Domain(_))));
    }

    #[test]
    fn loginv_at_e_minus_four() {
        // independent enclosure of e^-4 from the alternating series of e^-1
        // raised to the fourth power
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        let mut term = Rational::one();
        for k in 0..40 {
            if k > 0 {
                term /= int(k);
            }
            let signed = if k % 2 == 0 { term.clone() } else { -term.clone() };
            lo += &signed;
            hi += &signed;
        }
        // remainder bounded by the next term
        let next = term / int(40);
        lo -= &next;
        hi += &next;
        let t = RationalInterval::new(num_traits::pow(lo, 4), num_traits::pow(hi, 4)).unwrap();
        assert!(t.width() < pow2(-100));
        let tol = pow2(-60);
        let u = DimensionFunction::log_inverse().h_upper(&t, &tol).unwrap();
        assert!(u >= rat(1, 4));
        assert!(u <= rat(1, 4) + &tol + pow2(-90));
    }

    #[test]
    fn compare_power_one_against_half() {
        let h1: DimensionFunction = "pow:1".parse().unwrap();
        let h2: DimensionFunction = "pow:1/2".parse().unwrap();
        let probes: Vec<Rational> = (1..=20).map(|k| pow2(-k)).collect();
        let ev = h_compare(&h1, &h2, &probes).unwrap();
        assert!(ev.consistent);
        for (k, r) in (1..=20).zip(&ev.ratios) {
            // ratio is 2^(-k/2); even k are exact
            if k % 2 == 0 {
                assert!(r.contains(&pow2(-k / 2)));
            }
        }
    }

    #[test]
    fn compare_identical_functions_is_not_consistent() {
        let h: DimensionFunction = "pow:1/2".parse().unwrap();
        let probes: Vec<Rational> = (1..=10).map(|k| pow2(-k)).collect();
        let ev = h_compare(&h, &h, &probes).unwrap();
        assert!(!ev.consistent);
        assert!(ev.ratios.iter().all(|r| r.contains(&int(1))));
    }

    #[test]
    fn compare_quarter_power_against_loginv() {
        // h1/h2 at x = 2^-2^k equals 2^(k - 2^(k-2)) ln 2, computed here in
        // floating point as an independent oracle
        let h1: DimensionFunction = "pow:1/4".parse().unwrap();
        let h2 = DimensionFunction::log_inverse();
        let ks = [4u32, 5, 6];
        let probes: Vec<Rational> = ks.iter().map(|&k| pow2(-(1i64 << k))).collect();
        let ev = h_compare(&h1, &h2, &probes).unwrap();
        for (&k, r) in ks.iter().zip(&ev.ratios) {
            let oracle = 2f64.powf(k as f64 - 2f64.powi(k as i32 - 2)) * std::f64::consts::LN_2;
            let mid = r.midpoint().to_f64().unwrap();
            assert!((mid / oracle - 1.0).abs() < 1e-9, "k={k}: {mid} vs {oracle}");
        }
        assert!(ev.ratios.windows(2).all(|w| w[1].hi() < w[0].hi()));
        assert!(ev.consistent);
    }

    #[test]
    fn probes_must_decrease() {
        let h = DimensionFunction::log_inverse();
        assert!(h_compare(&h, &h, &[rat(1, 4), rat(1, 2)]).is_err());
    }

    #[test]
    fn log2_bound_matches_direct_evaluation_for_moderate_arguments() {
        let f = SmallFactor::new(3).unwrap();
        for h in all() {
            for e in [70i64, 90, 200] {
                let up = h.log2_upper_dyadic(&f, e).unwrap();
                // direct: log2 of an enclosure of h(3 * 2^-e)
                let x = int(3) * pow2(-e);
                let v = h.enclose(&x, &(&x * &x * pow2(-100))).unwrap();
                let direct = log2_enclosure(v.lo(), 96).unwrap();
                assert!(up >= *direct.lo(), "{h} e={e}");
                assert!(&up - direct.hi() < pow2(-60), "{h} e={e}: bound too loose");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn non_decreasing_on_unit_interval(a in 0u32..=4096, b in 0u32..=4096, which in 0usize..7) {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let h = &all()[which];
            let tol = pow2(-40);
            let ua = h.h_upper(&RationalInterval::point(rat(a as i64, 4096)), &tol).unwrap();
            let ub = h.h_upper(&RationalInterval::point(rat(b as i64, 4096)), &tol).unwrap();
            prop_assert!(ua <= ub + &tol * int(2));
            if a > 0 {
                prop_assert!(ua.is_positive());
            }
        }
    }
}
