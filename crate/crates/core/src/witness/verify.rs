//! Replay of a witness certificate.
//!
//! Grid cells, schedule and map values are recomputed here from the raw
//! inputs (power sums instead of Horner, integer-rank schedule, line-only
//! grid formula) so a bug in the search does not hide itself.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::certificate::WitnessCertificate;
use super::pattern::{Mode, PatternMap, PatternSpec};
use crate::numerics::interval::RationalInterval;
use crate::numerics::rational::{int, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    /// index into `steps`; `steps.len()` for the final interval and witness,
    /// `None` for problems with the pattern itself
    pub step: Option<usize>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub failure: Option<Failure>,
}

pub fn verify_certificate(cert: &WitnessCertificate) -> VerifyReport {
    match replay(cert) {
        Ok(()) => VerifyReport { ok: true, failure: None },
        Err(f) => VerifyReport {
            ok: false,
            failure: Some(f),
        },
    }
}

fn fail<T>(step: Option<usize>, reason: impl Into<String>) -> Result<T, Failure> {
    Err(Failure {
        step,
        reason: reason.into(),
    })
}

/// `(m, owner)` pairs: level `m` belongs to the map whose rank is
/// `1 + (number of trailing zero bits of m)`.
fn own_schedule(ranks: &[u32], depth: usize) -> Vec<(u64, usize)> {
    let mut out = Vec::with_capacity(depth);
    let mut m = 0u64;
    while out.len() < depth && m < (1u64 << 62) {
        m += 1;
        let r = m.trailing_zeros() + 1;
        if let Some(owner) = ranks.iter().position(|&x| x == r) {
            out.push((m, owner));
        }
    }
    out
}

/// `Σ c_k t^k`, term by term.
fn power_sum(coeffs: &[Rational], t: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut tk = Rational::one();
    for c in coeffs {
        acc += c * &tk;
        tk *= t;
    }
    acc
}

struct RootMap {
    signed: Vec<Rational>,
    q: Rational,
    n: usize,
}

impl RootMap {
    fn value_pow(&self, t: &Rational) -> Rational {
        // g(t)^n / q^n
        power_sum(&self.signed, t)
    }

    fn ge(&self, t: &Rational, c: &Rational) -> bool {
        !c.is_positive() || self.value_pow(t) >= num_traits::pow(c / &self.q, self.n)
    }

    fn le(&self, t: &Rational, c: &Rational) -> bool {
        !c.is_negative() && self.value_pow(t) <= num_traits::pow(c / &self.q, self.n)
    }
}

fn on_lattice(x: &Rational, bits: u32) -> bool {
    (x * Rational::from_integer(BigInt::one() << bits)).is_integer()
}

fn replay(cert: &WitnessCertificate) -> Result<(), Failure> {
    let spec: &PatternSpec = &cert.spec;
    if let Err(e) = spec.validate() {
        return fail(None, format!("pattern: {e}"));
    }
    let seq = &spec.deltas;
    let l = int(seq.L() as i64);
    let expected = own_schedule(&spec.ranks, spec.depth);
    if expected.len() != spec.depth {
        return fail(None, "schedule shorter than depth");
    }

    let mut roots = Vec::new();
    let mut affine = Vec::new();
    let mut cut = Rational::zero();
    match spec.mode {
        Mode::Preimage => {
            if let Err(e) = spec.conjugated() {
                return fail(None, format!("threshold: {e}"));
            }
            for m in &spec.maps {
                let PatternMap::Polynomial { poly, psi, threshold } = m else {
                    return fail(None, "non-polynomial map");
                };
                let n = poly.degree() as usize;
                let a = poly.leading().abs();
                let q = psi.q.to_rational();
                let sign = if poly.leading().is_negative() { -1 } else { 1 };
                if psi.n as usize != n || psi.sign != sign {
                    return fail(None, format!("conjugator does not match {poly}"));
                }
                // 1/(2 a^(1/n)) <= q <= 3/(4 a^(1/n))
                let two_q = num_traits::pow(int(2) * &q, n) * &a;
                let four_thirds_q = num_traits::pow(int(4) * &q / int(3), n) * &a;
                if two_q < int(1) || four_thirds_q > int(1) {
                    return fail(None, format!("conjugator outside its bracket for {poly}"));
                }
                cut = cut.max(int(*threshold));
                roots.push(RootMap {
                    signed: poly.coeffs().iter().map(|c| c * int(sign as i64)).collect(),
                    q,
                    n,
                });
            }
        }
        Mode::Image => {
            for m in &spec.maps {
                let PatternMap::Affine(f) = m else {
                    return fail(None, "non-affine map");
                };
                let Some(lambda) = &f.lambda else {
                    return fail(None, "affine map without conjugator");
                };
                let s = &f.slope * lambda.to_rational();
                if s.abs() < int(1) || s.abs() > l {
                    return fail(None, "conjugated slope outside [1, L]");
                }
                affine.push((s, f.intercept.clone()));
            }
        }
    }

    if cert.steps.len() != spec.depth {
        return fail(Some(cert.steps.len().min(spec.depth)), "wrong number of steps");
    }
    let bits = cert.tolerances.grid_bits;
    let unit = Rational::new(BigInt::one(), BigInt::one() << bits);
    for (k, step) in cert.steps.iter().enumerate() {
        let at = Some(k);
        if (step.m, step.owner) != expected[k] {
            return fail(at, "level or owner differs from the schedule");
        }
        let m = step.m as usize;
        let delta = seq.delta(m).map_err(|e| Failure {
            step: at,
            reason: e.to_string(),
        })?;
        let prev_delta = seq.delta(m - 1).expect("m - 1 < m");
        let period = &delta + prev_delta / (int(4) * &l);
        if step.grid_index.is_negative() {
            return fail(at, "negative grid index");
        }
        let lo = Rational::from_integer(step.grid_index.clone()) * &period;
        let cell = RationalInterval::new(lo.clone(), lo + &delta).expect("ordered");
        if step.c != cell {
            return fail(at, "C is not the recorded grid interval");
        }
        let x = &step.x;
        match spec.mode {
            Mode::Preimage => {
                let g = &roots[step.owner];
                if !on_lattice(x.lo(), bits) || !on_lattice(x.hi(), bits) {
                    return fail(at, "X endpoint off the lattice");
                }
                if k == 0 && x.lo() < &cut {
                    return fail(at, "X starts below the common threshold");
                }
                if !g.ge(x.lo(), cell.lo()) || g.ge(&(x.lo() - &unit), cell.lo()) {
                    return fail(at, "lower end of X is not the least lattice point reaching C");
                }
                if !g.le(x.hi(), cell.hi()) || g.le(&(x.hi() + &unit), cell.hi()) {
                    return fail(at, "upper end of X is not the greatest lattice point inside C");
                }
            }
            Mode::Image => {
                let (s, b) = &affine[step.owner];
                let image = RationalInterval::hull(s * cell.lo() + b, s * cell.hi() + b);
                if *x != image {
                    return fail(at, "X is not the image of C");
                }
                if k == 0 {
                    for (s, b) in &affine {
                        for y in [x.lo(), x.hi()] {
                            if (y - b) / s < l {
                                return fail(at, "witness range reaches below the domain cut");
                            }
                        }
                    }
                }
            }
        }
        if x.width() > &l * &delta {
            return fail(at, "X wider than L δ");
        }
        if k > 0 && !x.is_strict_subset_of(&cert.steps[k - 1].x) {
            return fail(at, "X not strictly nested in the previous step");
        }
    }
    let end = Some(cert.steps.len());
    if cert.final_interval != cert.steps.last().expect("depth >= 1").x {
        return fail(end, "final interval differs from the last X");
    }
    if cert.witness != cert.final_interval.midpoint() {
        return fail(end, "witness is not the midpoint of the final interval");
    }
    Ok(())
}
