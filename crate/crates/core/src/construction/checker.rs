//! Independent replay of the scale-sequence inequalities.
//!
//! Shares no evaluation code with the construction: logarithms and `1/e`
//! come from local series, and power functions are compared after raising
//! both sides to an integer power.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::delta::DeltaSequence;
use super::enumeration;
use crate::dimfun::DimKind;
use crate::numerics::rational::{int, pow2, Dyadic, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub m: usize,
    pub pair: Option<(u64, u64)>,
    pub what: String,
}

#[derive(Clone, Debug, Default)]
pub struct ReplayReport {
    pub inequalities_checked: usize,
    pub violations: Vec<Violation>,
}

impl ReplayReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `Σ_{k<=terms} 1/(k 2^k)` and that sum plus the tail bound.
fn ln2_bounds(terms: u32) -> (Rational, Rational) {
    let mut s = Rational::zero();
    for k in 1..=terms {
        s += Rational::new(1.into(), BigInt::from(k) << k);
    }
    let tail = Rational::new(1.into(), BigInt::from(terms + 1) << terms);
    (s.clone(), s + tail)
}

/// Bounds of `ln(1 + y)` for `|y| <= 1/3` from the alternating series.
fn ln1p_bounds(y: &Rational, terms: u32) -> (Rational, Rational) {
    let mut s = Rational::zero();
    let mut p = Rational::one();
    for k in 1..=terms {
        p *= y;
        let t = &p / int(k as i64);
        if k % 2 == 1 {
            s += t;
        } else {
            s -= t;
        }
    }
    // |remainder| <= |y|^(K+1) / ((K+1)(1-|y|)) <= 3/2 |y|^(K+1)
    let r = (p * y).abs() * Rational::new(3.into(), 2.into());
    (&s - &r, s + r)
}

/// Bounds of `ln b` for a positive integer.
fn ln_int_bounds(b: u64, ln2: &(Rational, Rational)) -> (Rational, Rational) {
    let mut t = 63 - b.leading_zeros() as i64;
    let mut u = Rational::from_integer(b.into()) * pow2(-t);
    if u > Rational::new(4.into(), 3.into()) {
        t += 1;
        u /= int(2);
    }
    let (lo, hi) = ln1p_bounds(&(u - int(1)), 160);
    (int(t) * &ln2.0 + lo, int(t) * &ln2.1 + hi)
}

/// Lower bound of `1/e` from an odd-length alternating partial sum.
fn inv_e_lower() -> Rational {
    let mut s = Rational::zero();
    let mut f = Rational::one();
    for k in 0..=41u32 {
        if k > 0 {
            f /= int(k as i64);
        }
        if k % 2 == 0 {
            s += &f;
        } else {
            s -= &f;
        }
    }
    s
}

fn bits(x: &Rational) -> i64 {
    // crude upper bound of log2 x for x >= 1
    (x.numer().bits() as i64) - (x.denom().bits() as i64) + 1
}

/// `lhs < 2^d`, exact, with shortcuts for extreme `d`.
fn below_pow2(lhs: &Rational, d: i64) -> bool {
    if lhs >= &Rational::one() && d <= 0 {
        return false;
    }
    if d > bits(lhs) + 2 {
        return true;
    }
    lhs < &pow2(d)
}

/// Replays δ_0 = 1, the geometric constraint and every indexed inequality.
pub fn check_sequence(seq: &DeltaSequence) -> ReplayReport {
    let mut report = ReplayReport::default();
    let deltas = seq.deltas();
    let fail = |m: usize, pair: Option<(u64, u64)>, what: String| Violation { m, pair, what };
    if deltas.first() != Some(&Dyadic::pow2(0)) {
        report.violations.push(fail(0, None, "δ_0 is not 1".into()));
        return report;
    }
    let ln2 = ln2_bounds(200);
    let inv_e = inv_e_lower();
    let n = seq.N() as i64;
    let l = seq.L() as i64;
    let exps: Vec<i64> = deltas.iter().map(|d| -d.exponent()).collect();
    if deltas.iter().any(|d| !d.mantissa().is_one()) {
        report.violations.push(fail(0, None, "scale is not a power of two".into()));
        return report;
    }
    for m in 1..deltas.len() {
        let (e_prev, e) = (exps[m - 1], exps[m]);
        // (2^(e-e'))^2 >= 16 L^2 N
        let d = e - e_prev;
        let geometric = d >= 0 && (d > 64 || (BigInt::one() << (2 * d) as u32) >= BigInt::from(16 * l * l * n));
        report.inequalities_checked += 1;
        if !geometric {
            report.violations.push(fail(m, None, "geometric constraint".into()));
        }
        for i in 1..=m as u64 {
            let (a, b) = enumeration::pair(i);
            report.inequalities_checked += 1;
            let a_eps = int(a as i64) + pow2(-e_prev.min(64));
            let ok = match seq.h().kind() {
                DimKind::Power(alpha) => power_holds(alpha, m, n, e_prev, e, &a_eps, b),
                DimKind::LogInverse => log_holds(None, m, n, e_prev, e, &a_eps, b, &ln2, &inv_e),
                DimKind::PowerLog(alpha, beta) => {
                    log_holds(Some((alpha, *beta)), m, n, e_prev, e, &a_eps, b, &ln2, &inv_e)
                }
            };
            if !ok {
                report.violations.push(fail(m, Some((a, b)), "indexed inequality".into()));
            }
        }
    }
    report
}

/// `m^q A^(qN) b^p < 2^(e p - q N e')` for `h = x^(p/q)`.
fn power_holds(alpha: &Rational, m: usize, n: i64, e_prev: i64, e: i64, a_eps: &Rational, b: u64) -> bool {
    let (Some(p), Some(q)) = (alpha.numer().to_i64(), alpha.denom().to_i64()) else {
        return false;
    };
    if e < 64 && Rational::from_integer(b.into()) * pow2(-e) > Rational::one() {
        return false;
    }
    let lhs = num_traits::pow(int(m as i64), q as usize)
        * num_traits::pow(a_eps.clone(), (q * n) as usize)
        * num_traits::pow(int(b as i64), p as usize);
    below_pow2(&lhs, e * p - q * n * e_prev)
}

#[allow(clippy::too_many_arguments)]
fn log_holds(
    power: Option<(&Rational, i64)>,
    m: usize,
    n: i64,
    e_prev: i64,
    e: i64,
    a_eps: &Rational,
    b: u64,
    ln2: &(Rational, Rational),
    inv_e: &Rational,
) -> bool {
    let x_small = e >= 64 || Rational::from_integer(b.into()) * pow2(-e) < *inv_e;
    if !x_small {
        // continuation branch: h(x) <= 1 + x - 1/e_lower, and e' is tiny here
        let x = Rational::from_integer(b.into()) * pow2(-e);
        if x > Rational::one() {
            return false;
        }
        let h_up = int(1) + x - inv_e;
        let lhs = pow2(n * e_prev) * num_traits::pow(a_eps.clone(), n as usize) * h_up * int(m as i64);
        return lhs < Rational::one();
    }
    // ln(1/x) >= e ln2_lo - ln b_hi
    let ell = int(e) * &ln2.0 - ln_int_bounds(b, ln2).1;
    if !ell.is_positive() {
        return false;
    }
    match power {
        None => {
            // need ell > m 2^(N e') A^N; the right side is at least 2^(N e')
            if n * e_prev > bits(&ell) {
                return false;
            }
            let rhs = int(m as i64) * pow2(n * e_prev) * num_traits::pow(a_eps.clone(), n as usize);
            ell > rhs
        }
        Some((alpha, beta)) => {
            let (Some(p), Some(q)) = (alpha.numer().to_i64(), alpha.denom().to_i64()) else {
                return false;
            };
            // m^q A^(qN) b^p < 2^(e p - q N e') ell^(q|β|)
            let lhs = num_traits::pow(int(m as i64), q as usize)
                * num_traits::pow(a_eps.clone(), (q * n) as usize)
                * num_traits::pow(int(b as i64), p as usize);
            let log_factor = num_traits::pow(ell, (q * beta.abs()) as usize);
            let d = e * p - q * n * e_prev;
            if d < -(bits(&log_factor) + 2) {
                return false;
            }
            below_pow2(&(lhs / log_factor), d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::delta::build_delta_sequence;
    use crate::dimfun::DimensionFunction;

    #[test]
    fn series_constants() {
        let (lo, hi) = ln2_bounds(200);
        assert!(lo < hi);
        assert!((lo.to_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        let (l3, h3) = ln_int_bounds(3, &(lo, hi));
        assert!(l3.to_f64().unwrap() <= 3f64.ln() + 1e-15 && h3.to_f64().unwrap() >= 3f64.ln() - 1e-15);
        assert!((inv_e_lower().to_f64().unwrap() - (-1f64).exp()).abs() < 1e-15);
        assert!(inv_e_lower() < Rational::new(3679.into(), 10000.into()));
    }

    #[test]
    fn replays_square_root_sequence() {
        let h: DimensionFunction = "pow:1/2".parse().unwrap();
        let s = build_delta_sequence(&h, 2, 1, 3).unwrap();
        let r = check_sequence(&s);
        assert!(r.ok(), "{:?}", r.violations);
        assert_eq!(r.inequalities_checked, 3 + 6);
    }

    #[test]
    fn detects_too_large_scale() {
        let h: DimensionFunction = "pow:1/2".parse().unwrap();
        let s = DeltaSequence::from_parts(h, 2, 1, vec![Dyadic::pow2(0), Dyadic::pow2(-3), Dyadic::pow2(-6)]).unwrap();
        let r = check_sequence(&s);
        assert!(!r.ok());
        assert!(r.violations.iter().all(|v| v.m == 2));
    }

    #[test]
    fn replays_log_kinds() {
        for name in ["loginv", "powlog:1/2:-1"] {
            let h: DimensionFunction = name.parse().unwrap();
            let depth = if name == "loginv" { 3 } else { 6 };
            let s = build_delta_sequence(&h, 2, 1, depth).unwrap();
            let r = check_sequence(&s);
            assert!(r.ok(), "{name}: {:?}", r.violations);
        }
    }
}
