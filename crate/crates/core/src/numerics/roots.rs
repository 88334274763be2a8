//! Certified n-th roots and inverses of increasing maps, both by bisection
//! on dyadic midpoints.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::interval::RationalInterval;
use super::rational::{dyadic_between, floor_log2, format_rational, pow2, Rational};
use crate::error::{Error, Result};

/// Hard limit on bisection steps for a single enclosure.
pub const MAX_BISECTION_STEPS: usize = 1_000_000;

/// Exact n-th root of a non-negative rational, when it is rational.
pub fn exact_nth_root(x: &Rational, n: u32) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    if x.is_zero() || n == 1 {
        return Some(x.clone());
    }
    let p = x.numer().nth_root(n);
    let q = x.denom().nth_root(n);
    (num_traits::pow(p.clone(), n as usize) == *x.numer()
        && num_traits::pow(q.clone(), n as usize) == *x.denom())
    .then(|| Rational::new(p, q))
}

/// `[l, h]` with `l^n <= x <= h^n` and `h - l <= tol`.
pub fn nth_root_bracket(x: &Rational, n: u32, tol: &Rational) -> Result<RationalInterval> {
    if x.is_negative() {
        return Err(Error::Domain(format!(
            "root of negative number {}",
            format_rational(x)
        )));
    }
    if let Some(r) = exact_nth_root(x, n) {
        return Ok(RationalInterval::point(r));
    }
    let mut lo = Rational::zero();
    // x^(1/n) < 2^(floor(log2 x)/n + 1)
    let k = floor_log2(x).div_euclid(n as i64) + 1;
    let mut hi = pow2(k);
    let mut steps = 0;
    while &hi - &lo > *tol {
        steps += 1;
        if steps > MAX_BISECTION_STEPS {
            return Err(Error::StepLimit(MAX_BISECTION_STEPS));
        }
        let mid = dyadic_between(&lo, &hi);
        let p = num_traits::pow(mid.clone(), n as usize);
        if &p <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RationalInterval::new(lo, hi)
}

/// Enclosure of `{ x^(1/n) : x in a }` whose width exceeds the exact image
/// width by at most `tol`.
pub fn iv_nth_root(a: &RationalInterval, n: u32, tol: &Rational) -> Result<RationalInterval> {
    if n == 0 {
        return Err(Error::Domain("zeroth root".into()));
    }
    if !tol.is_positive() {
        return Err(Error::Domain("root tolerance must be positive".into()));
    }
    if a.lo().is_negative() {
        return Err(Error::Domain(format!("root of interval {a} with negative part")));
    }
    let half = tol / Rational::from_integer(BigInt::from(2));
    let lo = nth_root_bracket(a.lo(), n, &half)?;
    if a.is_point() {
        return Ok(lo);
    }
    let hi = nth_root_bracket(a.hi(), n, &half)?;
    RationalInterval::new(lo.lo().clone(), hi.hi().clone())
}

/// A map the caller has certified to be strictly increasing on the region
/// where it is evaluated. `enclose` returns an enclosure of `f(x)` of width
/// at most `tol`.
pub trait MonotoneMap {
    fn enclose(&self, x: &Rational, tol: &Rational) -> Result<RationalInterval>;
}

impl<F> MonotoneMap for F
where
    F: Fn(&Rational, &Rational) -> Result<RationalInterval>,
{
    fn enclose(&self, x: &Rational, tol: &Rational) -> Result<RationalInterval> {
        self(x, tol)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    /// certified `f(x) <= t`
    Below,
    /// certified `f(x) > t`
    StrictlyAbove,
    /// certified `f(x) >= t`
    Above,
    /// certified `f(x) < t`
    StrictlyBelow,
}

struct Probe<'a, F: MonotoneMap + ?Sized> {
    f: &'a F,
    eval_tol: Rational,
    steps: usize,
}

impl<F: MonotoneMap + ?Sized> Probe<'_, F> {
    /// Classifies `x` against `t`, tightening the evaluation tolerance until
    /// one of the two requested sides is certified.
    fn classify(&mut self, x: &Rational, t: &Rational, sides: (Side, Side)) -> Result<Side> {
        let mut tol = self.eval_tol.clone();
        for _ in 0..256 {
            self.steps += 1;
            if self.steps > MAX_BISECTION_STEPS {
                return Err(Error::StepLimit(MAX_BISECTION_STEPS));
            }
            let e = self.f.enclose(x, &tol)?;
            for side in [sides.0, sides.1] {
                let ok = match side {
                    Side::Below => e.hi() <= t,
                    Side::StrictlyAbove => e.lo() > t,
                    Side::Above => e.lo() >= t,
                    Side::StrictlyBelow => e.hi() < t,
                };
                if ok {
                    return Ok(side);
                }
            }
            tol /= Rational::from_integer(BigInt::from(2));
        }
        Err(Error::StepLimit(MAX_BISECTION_STEPS))
    }
}

fn interpolation_guess(
    lo: &Rational,
    hi: &Rational,
    flo: &RationalInterval,
    fhi: &RationalInterval,
    t: &Rational,
) -> Option<Rational> {
    let a = flo.midpoint();
    let b = fhi.midpoint();
    if a >= b {
        return None;
    }
    let c = lo + (t - &a) * (hi - lo) / (b - a);
    (&c > lo && &c < hi).then_some(c)
}

/// Largest certified point (up to `tol`) with `f(x) <= t` in `search`.
fn largest_below<F: MonotoneMap + ?Sized>(
    p: &mut Probe<'_, F>,
    t: &Rational,
    search: &RationalInterval,
    tol: &Rational,
) -> Result<Rational> {
    let (mut lo, mut hi) = (search.lo().clone(), search.hi().clone());
    if p.classify(&hi, t, (Side::Below, Side::StrictlyAbove))? == Side::Below {
        return Ok(hi);
    }
    if p.classify(&lo, t, (Side::Below, Side::StrictlyAbove))? != Side::Below {
        return Err(Error::Bracket(format!(
            "target {} below image of search interval {search}",
            format_rational(t)
        )));
    }
    let flo = p.f.enclose(&lo, &p.eval_tol)?;
    let fhi = p.f.enclose(&hi, &p.eval_tol)?;
    if let Some(c) = interpolation_guess(&lo, &hi, &flo, &fhi, t) {
        let e = p.f.enclose(&c, &p.eval_tol)?;
        if e.is_point() && e.lo() == t {
            return Ok(c);
        }
    }
    while &hi - &lo > *tol {
        let mid = dyadic_between(&lo, &hi);
        match p.classify(&mid, t, (Side::Below, Side::StrictlyAbove))? {
            Side::Below => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(lo)
}

/// Smallest certified point (up to `tol`) with `f(x) >= t` in `search`.
fn smallest_above<F: MonotoneMap + ?Sized>(
    p: &mut Probe<'_, F>,
    t: &Rational,
    search: &RationalInterval,
    tol: &Rational,
) -> Result<Rational> {
    let (mut lo, mut hi) = (search.lo().clone(), search.hi().clone());
    if p.classify(&lo, t, (Side::Above, Side::StrictlyBelow))? == Side::Above {
        return Ok(lo);
    }
    if p.classify(&hi, t, (Side::Above, Side::StrictlyBelow))? != Side::Above {
        return Err(Error::Bracket(format!(
            "target {} above image of search interval {search}",
            format_rational(t)
        )));
    }
    let flo = p.f.enclose(&lo, &p.eval_tol)?;
    let fhi = p.f.enclose(&hi, &p.eval_tol)?;
    if let Some(c) = interpolation_guess(&lo, &hi, &flo, &fhi, t) {
        let e = p.f.enclose(&c, &p.eval_tol)?;
        if e.is_point() && e.lo() == t {
            return Ok(c);
        }
    }
    while &hi - &lo > *tol {
        let mid = dyadic_between(&lo, &hi);
        match p.classify(&mid, t, (Side::Above, Side::StrictlyBelow))? {
            Side::Above => hi = mid,
            _ => lo = mid,
        }
    }
    Ok(hi)
}

fn probe<'a, F: MonotoneMap + ?Sized>(f: &'a F, tol: &Rational) -> Result<Probe<'a, F>> {
    if !tol.is_positive() {
        return Err(Error::Domain("inverse tolerance must be positive".into()));
    }
    Ok(Probe {
        f,
        eval_tol: tol / Rational::from_integer(BigInt::from(16)),
        steps: 0,
    })
}

/// Outer enclosure `X ⊆ search` of the preimage of `y` under an increasing
/// `f`: `f(X) ⊇ y`, and each endpoint is within `tol` of the exact one.
pub fn monotone_inverse<F: MonotoneMap + ?Sized>(
    f: &F,
    y: &RationalInterval,
    search: &RationalInterval,
    tol: &Rational,
) -> Result<RationalInterval> {
    let mut p = probe(f, tol)?;
    let lo = largest_below(&mut p, y.lo(), search, tol)?;
    let hi = smallest_above(&mut p, y.hi(), search, tol)?;
    RationalInterval::new(lo, hi)
}

/// Inner enclosure: every `x` in the result satisfies `f(x) ∈ y`.
/// Fails with `Bracket` when `y` is too narrow to hold a certified point.
pub fn monotone_inverse_inner<F: MonotoneMap + ?Sized>(
    f: &F,
    y: &RationalInterval,
    search: &RationalInterval,
    tol: &Rational,
) -> Result<RationalInterval> {
    let mut p = probe(f, tol)?;
    let lo = smallest_above(&mut p, y.lo(), search, tol)?;
    let hi = largest_below(&mut p, y.hi(), search, tol)?;
    if lo > hi {
        return Err(Error::Bracket(format!(
            "no certified inner preimage of {y} at tolerance {}",
            format_rational(tol)
        )));
    }
    RationalInterval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{int, rat};

    fn iv(a: Rational, b: Rational) -> RationalInterval {
        RationalInterval::new(a, b).unwrap()
    }

    #[test]
    fn perfect_square_root() {
        let r = iv_nth_root(&iv(int(4), int(4)), 2, &pow2(-10)).unwrap();
        assert!(r.contains(&int(2)));
        assert!(r.width() <= pow2(-10));
        assert_eq!(r, RationalInterval::point(int(2)));
    }

    #[test]
    fn zero_cube_root() {
        let r = iv_nth_root(&iv(int(0), int(0)), 3, &pow2(-5)).unwrap();
        assert_eq!(r, RationalInterval::point(int(0)));
    }

    #[test]
    fn sqrt2_endpoints_bracket_two() {
        let r = iv_nth_root(&iv(int(2), int(2)), 2, &pow2(-20)).unwrap();
        assert!(r.width() <= pow2(-20));
        assert!(r.lo() * r.lo() <= int(2));
        assert!(r.hi() * r.hi() >= int(2));
    }

    #[test]
    fn negative_input_rejected() {
        assert!(matches!(
            iv_nth_root(&iv(int(-1), int(1)), 2, &pow2(-5)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn wide_interval_width_bound() {
        let a = iv(rat(1, 3), int(7));
        let tol = pow2(-30);
        let r = iv_nth_root(&a, 3, &tol).unwrap();
        // exact width is 7^(1/3) - (1/3)^(1/3); compare with a looser independent
        // bracket of both cube roots
        let hi = nth_root_bracket(&int(7), 3, &pow2(-60)).unwrap();
        let lo = nth_root_bracket(&rat(1, 3), 3, &pow2(-60)).unwrap();
        assert!(r.width() <= hi.hi() - lo.lo() + tol);
        assert!(num_traits::pow(r.hi().clone(), 3) >= int(7));
        assert!(num_traits::pow(r.lo().clone(), 3) <= rat(1, 3));
    }

    fn exact<'a>(f: &'a dyn Fn(&Rational) -> Rational) -> impl Fn(&Rational, &Rational) -> Result<RationalInterval> + 'a {
        move |x, _| Ok(RationalInterval::point(f(x)))
    }

    #[test]
    fn inverse_of_linear_map_is_exact() {
        let half = |x: &Rational| x / int(2);
        let f = exact(&half);
        let x = monotone_inverse(&f, &iv(int(2), int(3)), &iv(int(1), int(1000)), &pow2(-20)).unwrap();
        assert_eq!(x, iv(int(4), int(6)));
    }

    #[test]
    fn inverse_of_identity() {
        let id = |x: &Rational| x.clone();
        let f = exact(&id);
        let y = iv(rat(1, 3), rat(5, 7));
        let x = monotone_inverse(&f, &y, &iv(int(0), int(1)), &pow2(-20)).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn inverse_of_square_brackets_target() {
        let sq = |x: &Rational| x * x;
        let f = exact(&sq);
        let y = iv(int(4), int(9));
        let tol = pow2(-24);
        let x = monotone_inverse(&f, &y, &iv(int(1), int(10)), &tol).unwrap();
        assert!(x.lo() * x.lo() <= int(4));
        assert!(x.hi() * x.hi() >= int(9));
        assert!(x.width() <= int(1) + &tol * int(2));
        let inner = monotone_inverse_inner(&f, &y, &iv(int(1), int(10)), &tol).unwrap();
        assert!(inner.lo() * inner.lo() >= int(4));
        assert!(inner.hi() * inner.hi() <= int(9));
        assert!(inner.is_subset_of(&x));
    }

    #[test]
    fn unbracketed_target_is_bracket_error() {
        let id = |x: &Rational| x.clone();
        let f = exact(&id);
        let r = monotone_inverse(&f, &iv(int(20), int(30)), &iv(int(0), int(10)), &pow2(-8));
        assert!(matches!(r, Err(Error::Bracket(_))));
    }
}
