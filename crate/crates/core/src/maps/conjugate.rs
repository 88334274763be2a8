//! Root conjugators `ψ(x) = q |x|^(1/n)` and the maps `g = ψ ∘ P`.
//!
//! With `s = sign(a_n)`, `g(x) = q (s P(x))^(1/n)` on the half-line where
//! `s P > 0`. The threshold `M` is the least integer for which `g` has
//! derivative in `[1/4, 1]` on all of `[M - 1, ∞)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::polynomial::{eval_nonneg, horner, Polynomial};
use crate::error::{Error, Result};
use crate::numerics::interval::RationalInterval;
use crate::numerics::rational::{int, pow2, rat, Dyadic, Rational};
use crate::numerics::roots::{monotone_inverse, nth_root_bracket};

/// Largest threshold tried before giving up.
pub const MAX_THRESHOLD: i64 = 1 << 40;
/// Subdivision stops below this piece width.
const MIN_PIECE: i64 = -24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conjugator {
    pub q: Dyadic,
    pub n: u32,
    pub sign: i8,
}

/// Dyadic `q` inside a certified sub-bracket of `[1/(2r), 3/(4r)]`,
/// `r = |a_n|^(1/n)`.
pub fn choose_conjugator(p: &Polynomial) -> Conjugator {
    let n = p.degree();
    let (lo, hi) = conjugator_bracket(p);
    Conjugator {
        q: simplest_dyadic(&lo, &hi),
        n,
        sign: if p.leading().is_negative() { -1 } else { 1 },
    }
}

/// Certified sub-bracket of `[1/(2r), 3/(4r)]`.
pub fn conjugator_bracket(p: &Polynomial) -> (Rational, Rational) {
    let n = p.degree();
    let r = nth_root_bracket(&p.leading().abs(), n, &pow2(-40)).expect("positive leading coefficient");
    (int(1) / (int(2) * r.lo()), rat(3, 4) / r.hi())
}

/// Exact test `1/(2r) <= q <= 3/(4r)`, i.e. `(2q)^n |a_n| >= 1 >= (4q/3)^n |a_n|`.
pub fn in_bracket(q: &Rational, p: &Polynomial) -> bool {
    let n = p.degree() as usize;
    let a = p.leading().abs();
    num_traits::pow(int(2) * q, n) * &a >= int(1) && num_traits::pow(rat(4, 3) * q, n) * a <= int(1)
}

/// The dyadic in `[lo, hi]` whose canonical exponent has the smallest
/// magnitude, nearest to the midpoint among those.
fn simplest_dyadic(lo: &Rational, hi: &Rational) -> Dyadic {
    let mid = (lo + hi) / int(2);
    for d in 0i64.. {
        for e in [d, -d] {
            let unit = pow2(e);
            // odd multiples m 2^e inside [lo, hi]
            let first = (lo / &unit).ceil().to_integer();
            let last = (hi / &unit).floor().to_integer();
            let mut best: Option<BigInt> = None;
            let target = (&mid / &unit).round().to_integer();
            for cand in [&target - 1, target.clone(), &target + 1, first.clone(), &first + 1, last.clone(), &last - 1] {
                if cand < first || cand > last || (&cand % 2u32).is_zero() {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some(b) => {
                        let db = (Rational::from_integer(b.clone()) * &unit - &mid).abs();
                        let dc = (Rational::from_integer(cand.clone()) * &unit - &mid).abs();
                        dc < db
                    }
                };
                if better {
                    best = Some(cand);
                }
            }
            if let Some(m) = best {
                return Dyadic::new(m, e);
            }
        }
    }
    unreachable!("a non-degenerate interval contains dyadics")
}

/// `ψ ∘ P` together with its certified threshold.
#[derive(Clone, Debug)]
pub struct ConjugatedMap {
    poly: Polynomial,
    psi: Conjugator,
    threshold: i64,
    tail_start: Rational,
    /// `s P` coefficients
    signed: Vec<Rational>,
    q: Rational,
}

impl ConjugatedMap {
    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn psi(&self) -> &Conjugator {
        &self.psi
    }

    /// `M_P`.
    pub fn threshold(&self) -> i64 {
        self.threshold
    }

    pub fn tail_start(&self) -> &Rational {
        &self.tail_start
    }

    /// Certified bounds of `|g'|` on `[M_P - 1, ∞)`.
    pub fn derivative_bounds(&self) -> RationalInterval {
        RationalInterval::new(rat(1, 4), int(1)).expect("ordered")
    }

    /// `s P(t)`, exact.
    pub fn signed_value(&self, t: &Rational) -> Rational {
        horner(&self.signed, t)
    }

    /// Exact test `g(t) >= c`, for `t >= M - 1`.
    pub fn at_least(&self, t: &Rational, c: &Rational) -> bool {
        if !c.is_positive() {
            return true;
        }
        self.signed_value(t) >= num_traits::pow(c / &self.q, self.psi.n as usize)
    }

    /// Exact test `g(t) <= c`, for `t >= M - 1`.
    pub fn at_most(&self, t: &Rational, c: &Rational) -> bool {
        if c.is_negative() {
            return false;
        }
        self.signed_value(t) <= num_traits::pow(c / &self.q, self.psi.n as usize)
    }

    /// Enclosure of `g(t)` of width at most `tol`.
    pub fn enclose_point(&self, t: &Rational, tol: &Rational) -> Result<RationalInterval> {
        if t < &int(self.threshold - 1) {
            return Err(Error::Domain(format!("{t} below the certified domain")));
        }
        let v = self.signed_value(t);
        let root = nth_root_bracket(&v, self.psi.n, &(tol / &self.q))?;
        Ok(root.scale(&self.q))
    }
}

/// Certifies the threshold of `ψ ∘ P`.
pub fn compute_threshold(p: &Polynomial, psi: &Conjugator) -> Result<ConjugatedMap> {
    let n = p.degree();
    if psi.n != n {
        return Err(Error::Config("conjugator degree does not match polynomial".into()));
    }
    let s = if p.leading().is_negative() { -1 } else { 1 };
    if psi.sign != s {
        return Err(Error::Config("conjugator sign does not match polynomial".into()));
    }
    let q = psi.q.to_rational();
    if !in_bracket(&q, p) {
        return Err(Error::Config("conjugator outside its bracket".into()));
    }
    let signed = p.scaled(&int(s as i64));
    let mut cm = ConjugatedMap {
        poly: p.clone(),
        psi: psi.clone(),
        threshold: 0,
        tail_start: Rational::zero(),
        signed,
        q,
    };
    if let Some(x0) = shifted_power_root(&cm.signed) {
        // g is affine on [x0, ∞) with slope q c^(1/n) ∈ [1/2, 3/4]
        let m = (x0.ceil().to_integer() + 1u32).max(BigInt::one());
        cm.threshold = m.to_i64().filter(|&m| m <= MAX_THRESHOLD).ok_or_else(|| cap_error(p))?;
        cm.tail_start = int(cm.threshold - 1);
        return Ok(cm);
    }
    let tail = tail_start(&cm)?;
    cm.tail_start = tail.clone();
    let holds = |m: i64| certify_range(&cm, &int(m - 1), &tail);
    let threshold = if holds(1) {
        1
    } else {
        let mut fail = 1i64;
        let mut m = 2i64;
        while !holds(m) {
            fail = m;
            m *= 2;
            if m > MAX_THRESHOLD {
                return Err(cap_error(p));
            }
        }
        let mut pass = m;
        while pass - fail > 1 {
            let mid = fail + (pass - fail) / 2;
            if holds(mid) {
                pass = mid;
            } else {
                fail = mid;
            }
        }
        pass
    };
    cm.threshold = threshold;
    Ok(cm)
}

fn cap_error(p: &Polynomial) -> Error {
    Error::Certification {
        step: 0,
        reason: format!("no threshold below 2^40 for {p}"),
    }
}

/// `x0` when the coefficients are exactly `c (x - x0)^n`.
fn shifted_power_root(c: &[Rational]) -> Option<Rational> {
    let n = c.len() - 1;
    let lead = &c[n];
    let x0 = -&c[n - 1] / (lead * int(n as i64));
    let mut binom = Rational::one();
    let mut power = Rational::one();
    // coefficient of x^(n-k) is lead C(n,k) (-x0)^k
    for k in 0..=n {
        if k > 0 {
            binom = binom * int((n - k + 1) as i64) / int(k as i64);
            power *= -&x0;
        }
        if c[n - k] != lead * &binom * &power {
            return None;
        }
    }
    Some(x0)
}

/// Sums `Σ_{k<n} |a_k| T^k / (|a_n| T^n)` and the analogue for `P'/n`.
fn tail_ratios(c: &[Rational], t: &Rational) -> (Rational, Rational) {
    let n = c.len() - 1;
    let lead = c[n].abs();
    let mut s = Rational::zero();
    let mut tk = Rational::one();
    let mut r = Rational::zero();
    for k in 0..n {
        s += c[k].abs() * &tk;
        if k + 1 < n {
            r += c[k + 1].abs() * int((k + 1) as i64) * &tk;
        }
        tk *= t;
    }
    // tk = T^n here
    let s = s / (&lead * &tk);
    let r = r * t / (&lead * int(n as i64) * tk);
    (s, r)
}

/// A point `T` beyond which the derivative bounds follow from domination
/// by the leading term.
fn tail_start(cm: &ConjugatedMap) -> Result<Rational> {
    let n = cm.psi.n as usize;
    let lead = cm.signed[n].clone();
    let qn_a = num_traits::pow(cm.q.clone(), n) * &lead;
    let four_n = num_traits::pow(int(4), n);
    let mut t = int(1);
    while t <= int(MAX_THRESHOLD) {
        let (s, r) = tail_ratios(&cm.signed, &t);
        if s <= rat(1, 2) && r < int(1) {
            // d^n = q^n |a_n| (1 ± R)^n / (1 ± S)^(n-1)
            let upper = &qn_a * num_traits::pow(int(1) + &r, n) <= num_traits::pow(int(1) - &s, n - 1);
            let lower = &qn_a * &four_n * num_traits::pow(int(1) - &r, n) >= num_traits::pow(int(1) + &s, n - 1);
            if upper && lower {
                return Ok(t);
            }
        }
        t *= int(2);
    }
    Err(Error::Certification {
        step: 0,
        reason: format!("no tail bound for {}", cm.poly),
    })
}

/// Whether `s P > 0`, `s P' > 0` and `g' ∈ [1/4, 1]` on `[a, b]`
/// (trivially true when `a >= b`, the tail covers it).
fn certify_range(cm: &ConjugatedMap, a: &Rational, b: &Rational) -> bool {
    if a >= b {
        return true;
    }
    let n = cm.psi.n as usize;
    let deriv: Vec<Rational> = cm
        .signed
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * int(k as i64) / int(n as i64))
        .collect();
    let qn = num_traits::pow(cm.q.clone(), n);
    let four_n = num_traits::pow(int(4), n);
    // bounds are checked on g'^n = q^n (sP'/n)^n / (sP)^(n-1)
    let point_ok = |x: &Rational| {
        let v = horner(&cm.signed, x);
        let d = horner(&deriv, x);
        if !v.is_positive() || !d.is_positive() {
            return false;
        }
        let top = &qn * num_traits::pow(d, n);
        let bottom = num_traits::pow(v, n - 1);
        top <= bottom && &top * &four_n >= bottom
    };
    let piece_ok = |x: &RationalInterval| {
        let v = eval_nonneg(&cm.signed, x);
        let d = eval_nonneg(&deriv, x);
        if !v.lo().is_positive() || !d.lo().is_positive() {
            return false;
        }
        let top_hi = &qn * num_traits::pow(d.hi().clone(), n);
        let top_lo = &qn * num_traits::pow(d.lo().clone(), n);
        top_hi <= num_traits::pow(v.lo().clone(), n - 1)
            && top_lo * &four_n >= num_traits::pow(v.hi().clone(), n - 1)
    };
    let min_width = pow2(MIN_PIECE);
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((lo, hi)) = stack.pop() {
        if !point_ok(&lo) || !point_ok(&hi) {
            return false;
        }
        let piece = RationalInterval::new(lo.clone(), hi.clone()).expect("ordered");
        if piece_ok(&piece) {
            continue;
        }
        if &hi - &lo < min_width {
            return false;
        }
        let mid = crate::numerics::rational::dyadic_between(&lo, &hi);
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    true
}

/// Enclosure of `g(x)` for `x ⊆ [M, ∞)`; `g` is increasing there.
pub fn g_forward(cm: &ConjugatedMap, x: &RationalInterval, tol: &Rational) -> Result<RationalInterval> {
    if x.lo() < &int(cm.threshold) {
        return Err(Error::Domain(format!("{x} not inside [{}, ∞)", cm.threshold)));
    }
    let lo = cm.enclose_point(x.lo(), tol)?;
    let hi = cm.enclose_point(x.hi(), tol)?;
    RationalInterval::new(lo.lo().clone(), hi.hi().clone())
}

/// Outer enclosure of `g^{-1}(y)` inside `[M, ∞)`.
pub fn g_inverse(cm: &ConjugatedMap, y: &RationalInterval, tol: &Rational) -> Result<RationalInterval> {
    let m = int(cm.threshold);
    let gm = cm.enclose_point(&m, &(tol / int(8)))?;
    if y.lo() < gm.hi() {
        return Err(Error::Bracket(format!("{y} reaches below g(M) = {gm}")));
    }
    // g' >= 1/4, so g(x) >= g(M) + (x - M)/4
    let top = &m + int(4) * (y.hi() - gm.lo()) + int(1);
    let search = RationalInterval::new(m, top)?;
    let f = |x: &Rational, t: &Rational| cm.enclose_point(x, t);
    monotone_inverse(&f, y, &search, &(tol / int(2)))
}
