//! Certified enclosures of `ln` and `exp` at rational arguments.
//!
//! Series are summed over dyadic-rounded intervals so denominators stay
//! bounded by the requested precision.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::interval::{iv_add, iv_div, iv_mul, RationalInterval};
use super::rational::{floor_log2, format_rational, int, pow2, round_down, round_up, Rational};
use crate::error::{Error, Result};

fn round_out(x: &RationalInterval, bits: u64) -> RationalInterval {
    RationalInterval::hull(round_down(x.lo(), bits), round_up(x.hi(), bits))
}

/// `atanh(u)` for `0 <= u <= 1/2`, enclosure width about `2^-bits`.
fn atanh_enclosure(u: &RationalInterval, bits: u64) -> RationalInterval {
    let p = bits + 16;
    let u = round_out(u, p);
    let u2 = round_out(&u.powi(2), p);
    let mut power = u.clone();
    let mut sum = RationalInterval::point(Rational::zero());
    let mut k: i64 = 0;
    let eps = pow2(-(p as i64));
    loop {
        let term = round_out(&power.scale(&Rational::new(BigInt::one(), BigInt::from(2 * k + 1))), p);
        sum = iv_add(&sum, &term);
        k += 1;
        power = round_out(&iv_mul(&power, &u2), p);
        // tail <= u^(2k+1) / ((2k+1)(1-u^2))
        let tail = power.hi() / (int(2 * k + 1) * (int(1) - u2.hi()));
        if tail < eps {
            return RationalInterval::hull(sum.lo().clone(), sum.hi() + tail);
        }
    }
}

/// Enclosure of `ln 2`.
pub fn ln2_enclosure(bits: u64) -> RationalInterval {
    let third = RationalInterval::point(Rational::new(BigInt::one(), BigInt::from(3)));
    atanh_enclosure(&third, bits + 2).scale(&int(2))
}

/// Enclosure of `ln x` for rational `x > 0`.
pub fn ln_enclosure(x: &Rational, bits: u64) -> Result<RationalInterval> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("ln of non-positive {}", format_rational(x))));
    }
    if x.is_one() {
        return Ok(RationalInterval::point(Rational::zero()));
    }
    let k = floor_log2(x);
    let z = x / pow2(k);
    // z in [1, 2): ln z = 2 atanh((z-1)/(z+1)), argument below 1/3
    let u = (&z - int(1)) / (&z + int(1));
    let frac = atanh_enclosure(&RationalInterval::point(u), bits + 2).scale(&int(2));
    if k == 0 {
        return Ok(frac);
    }
    let extra = 64 - (k.unsigned_abs()).leading_zeros() as u64;
    let ln2 = ln2_enclosure(bits + extra + 2);
    Ok(iv_add(&ln2.scale(&int(k)), &frac))
}

/// Enclosure of `log2 x` for rational `x > 0`.
pub fn log2_enclosure(x: &Rational, bits: u64) -> Result<RationalInterval> {
    let k = floor_log2(x);
    if x == &pow2(k) {
        return Ok(RationalInterval::point(int(k)));
    }
    let ln = ln_enclosure(x, bits + 4)?;
    iv_div(&ln, &ln2_enclosure(bits + 8))
}

/// Enclosure of `exp x` for rational `x`.
pub fn exp_enclosure(x: &Rational, bits: u64) -> Result<RationalInterval> {
    if x.is_zero() {
        return Ok(RationalInterval::point(int(1)));
    }
    if x.is_negative() {
        let pos = exp_enclosure(&-x, bits + 4)?;
        return iv_div(&RationalInterval::point(int(1)), &pos);
    }
    // exp(x) = exp(x / 2^s)^(2^s) with x / 2^s <= 1/2
    let s = (floor_log2(x) + 2).max(0) as u64;
    let p = bits + 2 * s + 16 + (floor_log2(x).max(0) as u64) * 2;
    let y = x / pow2(s as i64);
    let eps = pow2(-(p as i64));
    let (mut tlo, mut thi) = (Rational::one(), Rational::one());
    let mut sum = RationalInterval::point(Rational::one());
    let mut k: i64 = 1;
    loop {
        tlo = round_down(&(&tlo * &y / int(k)), p);
        thi = round_up(&(&thi * &y / int(k)), p);
        sum = iv_add(&sum, &RationalInterval::hull(tlo.clone(), thi.clone()));
        k += 1;
        // tail <= term * y / (k (1 - y/k)) <= 2 term y / k
        let tail = &thi * &y * int(2) / int(k);
        if tail < eps {
            sum = RationalInterval::hull(sum.lo().clone(), sum.hi() + tail);
            break;
        }
    }
    for _ in 0..s {
        sum = round_out(&sum.powi(2), p);
    }
    Ok(sum)
}

/// Enclosure of `1/e`.
pub fn inv_e_enclosure(bits: u64) -> RationalInterval {
    exp_enclosure(&int(-1), bits).expect("exp(-1) is always defined")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rat;

    fn approx(x: &RationalInterval) -> f64 {
        use num_traits::ToPrimitive;
        x.midpoint().to_f64().unwrap()
    }

    #[test]
    fn ln2_is_tight_and_correct() {
        let l = ln2_enclosure(100);
        assert!(l.width() < pow2(-95));
        assert!((approx(&l) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn ln_of_various() {
        for (x, expect) in [(rat(3, 1), 3f64.ln()), (rat(1, 10), 0.1f64.ln()), (rat(1000, 7), (1000f64 / 7.0).ln())] {
            let l = ln_enclosure(&x, 80).unwrap();
            assert!(l.width() < pow2(-70), "{l}");
            assert!((approx(&l) - expect).abs() < 1e-12);
        }
        assert_eq!(ln_enclosure(&int(1), 10).unwrap(), RationalInterval::point(int(0)));
        assert!(ln_enclosure(&int(0), 10).is_err());
    }

    #[test]
    fn log2_of_power_of_two_is_exact() {
        assert_eq!(log2_enclosure(&pow2(-64), 30).unwrap(), RationalInterval::point(int(-64)));
        let l = log2_enclosure(&int(3), 60).unwrap();
        assert!((approx(&l) - 3f64.log2()).abs() < 1e-14);
    }

    #[test]
    fn exp_matches_float() {
        for (x, expect) in [(int(-1), (-1f64).exp()), (int(4), 4f64.exp()), (rat(-1, 2), (-0.5f64).exp())] {
            let e = exp_enclosure(&x, 80).unwrap();
            assert!(e.width() < pow2(-60) * int(100), "{e}");
            assert!((approx(&e) / expect - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn exp_and_ln_are_mutually_consistent() {
        // ln(exp(3)) must enclose 3 (checked through endpoint monotonicity)
        let e = exp_enclosure(&int(3), 80).unwrap();
        let lo = ln_enclosure(e.lo(), 80).unwrap();
        let hi = ln_enclosure(e.hi(), 80).unwrap();
        assert!(lo.lo() <= &int(3) && hi.hi() >= &int(3));
    }
}
