//! Greedy construction of the scale sequence `δ_0 = 1 > δ_1 > ...`.
//!
//! Each `δ_m` is the largest power of two satisfying
//! * `δ_m <= δ_{m-1} / (4 L √N)`, and
//! * `(a/δ_{m-1} + 1)^N h(b δ_m) < 1/m` for the first `m` enumerated pairs `(a, b)`.
//!
//! The second family is checked in the log domain, so levels whose
//! exponents run into the billions cost the same as shallow ones.

use serde::{Deserialize, Serialize};

use super::enumeration;
use crate::dimfun::{DimensionFunction, SmallFactor};
use crate::error::{Error, Result};
use crate::numerics::elementary::log2_enclosure;
use crate::numerics::interval::RationalInterval;
use crate::numerics::rational::{int, pow2, Dyadic, Rational};
use crate::numerics::roots::nth_root_bracket;

/// Exponents above this are reported as unrepresentable.
pub const MAX_EXPONENT: i64 = 1 << 62;

/// Certified enclosure `[√N_lower, √N_upper]`.
pub fn sqrt_enclosure(n: u32) -> RationalInterval {
    nth_root_bracket(&int(n as i64), 2, &pow2(-64)).expect("square root of a positive integer")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub m: usize,
    /// `δ_m = 2^-exponent`
    pub exponent: i64,
    /// smallest exponent allowed by the geometric constraint alone
    pub geometric_exponent: i64,
    /// enumerated pair that forced the final exponent, if any did
    pub binding_pair: Option<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaSequence {
    #[serde(rename = "L")]
    l: u32,
    #[serde(rename = "N")]
    n: u32,
    h: DimensionFunction,
    deltas: Vec<Dyadic>,
    enumeration: String,
    #[serde(default)]
    transcript: Vec<LevelRecord>,
}

impl DeltaSequence {
    /// Wraps externally supplied scales. Every scale must be a power of two,
    /// start at 1, and respect the geometric constraint.
    pub fn from_parts(h: DimensionFunction, l: u32, n: u32, deltas: Vec<Dyadic>) -> Result<Self> {
        let seq = DeltaSequence {
            l,
            n,
            h,
            deltas,
            enumeration: enumeration::TAG.into(),
            transcript: Vec::new(),
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::Config("L must be at least 2".into()));
        }
        if self.n < 1 {
            return Err(Error::Config("N must be positive".into()));
        }
        if self.enumeration != enumeration::TAG {
            return Err(Error::Config(format!("unknown enumeration {:?}", self.enumeration)));
        }
        if self.deltas.first() != Some(&Dyadic::pow2(0)) {
            return Err(Error::Config("sequence must start with δ_0 = 1".into()));
        }
        if let Some(d) = self.deltas.iter().find(|d| d.mantissa() != &1.into()) {
            return Err(Error::Config(format!("scale {d} is not a power of two")));
        }
        let k = geometric_step(self.l, self.n);
        for m in 1..self.deltas.len() {
            if self.exponent(m) - self.exponent(m - 1) < k {
                return Err(Error::Config(format!("scale {m} violates the geometric constraint")));
            }
        }
        Ok(())
    }

    #[allow(non_snake_case)]
    pub fn L(&self) -> u32 {
        self.l
    }

    #[allow(non_snake_case)]
    pub fn N(&self) -> u32 {
        self.n
    }

    pub fn h(&self) -> &DimensionFunction {
        &self.h
    }

    /// Index of the deepest available level.
    pub fn depth(&self) -> usize {
        self.deltas.len() - 1
    }

    pub fn deltas(&self) -> &[Dyadic] {
        &self.deltas
    }

    pub fn transcript(&self) -> &[LevelRecord] {
        &self.transcript
    }

    /// `e` with `δ_m = 2^-e`.
    pub fn exponent(&self, m: usize) -> i64 {
        -self.deltas[m].exponent()
    }

    pub fn delta(&self, m: usize) -> Result<Rational> {
        self.deltas
            .get(m)
            .map(Dyadic::to_rational)
            .ok_or(Error::Index {
                index: m,
                len: self.deltas.len(),
            })
    }

    /// Prefix `δ_0..δ_depth`.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        if depth > self.depth() {
            return Err(Error::Index {
                index: depth,
                len: self.deltas.len(),
            });
        }
        let mut s = self.clone();
        s.deltas.truncate(depth + 1);
        s.transcript.retain(|r| r.m <= depth);
        Ok(s)
    }
}

/// Smallest `k` with `2^k >= 4 L √N_upper`.
pub fn geometric_step(l: u32, n: u32) -> i64 {
    let bound = int(4 * l as i64) * sqrt_enclosure(n).hi();
    let mut k = 0;
    while pow2(k) < bound {
        k += 1;
    }
    k
}

struct PairBound {
    pair: (u64, u64),
    /// upper bound of log2(a + 2^-min(e',64))
    log2_a: Rational,
    factor: SmallFactor,
}

/// Builds `δ_0..δ_depth` greedily.
pub fn build_delta_sequence(h: &DimensionFunction, l: u32, n: u32, depth: usize) -> Result<DeltaSequence> {
    if l < 2 {
        return Err(Error::Config("L must be at least 2".into()));
    }
    if n < 1 {
        return Err(Error::Config("N must be positive".into()));
    }
    let step = geometric_step(l, n);
    let mut exps = vec![0i64];
    let mut transcript = Vec::with_capacity(depth);
    let mut pairs: Vec<PairBound> = Vec::new();
    for m in 1..=depth {
        let prev = exps[m - 1];
        let (a, b) = enumeration::pair(m as u64);
        pairs.push(PairBound {
            pair: (a, b),
            log2_a: Rational::default(),
            factor: SmallFactor::new(b)?,
        });
        let eps_exp = prev.min(64);
        for p in pairs.iter_mut() {
            let a = int(p.pair.0 as i64) + pow2(-eps_exp);
            p.log2_a = log2_enclosure(&a, 96)?.hi().clone();
        }
        // log2(1/m) >= -log2_upper(m)
        let target = -log2_enclosure(&int(m as i64), 96)?.hi().clone();
        let geometric = prev + step;
        let mut best = geometric;
        let mut binding = None;
        for p in &pairs {
            let holds = |e: i64| -> Result<bool> {
                let lhs = int(n as i64) * (int(prev) + &p.log2_a);
                match h.log2_upper_dyadic(&p.factor, e) {
                    Ok(v) => Ok(lhs + v < target),
                    Err(Error::Domain(_)) => Ok(false),
                    Err(e) => Err(e),
                }
            };
            let e = minimal_exponent(best, holds).map_err(|err| match err {
                Error::Unrepresentable { .. } => Error::Unrepresentable { level: m },
                other => other,
            })?;
            if e > best {
                best = e;
                binding = Some(p.pair);
            }
        }
        exps.push(best);
        transcript.push(LevelRecord {
            m,
            exponent: best,
            geometric_exponent: geometric,
            binding_pair: binding,
        });
    }
    Ok(DeltaSequence {
        l,
        n,
        h: h.clone(),
        deltas: exps.iter().map(|&e| Dyadic::pow2(-e)).collect(),
        enumeration: enumeration::TAG.into(),
        transcript,
    })
}

/// Least `e >= start` with `holds(e)`, for a predicate monotone in `e`.
fn minimal_exponent(start: i64, holds: impl Fn(i64) -> Result<bool>) -> Result<i64> {
    if holds(start)? {
        return Ok(start);
    }
    let mut fail = start;
    let mut step = 1i64;
    let pass = loop {
        let cand = start.checked_add(step).filter(|&c| c <= MAX_EXPONENT);
        let Some(cand) = cand else {
            return Err(Error::Unrepresentable { level: 0 });
        };
        if holds(cand)? {
            break cand;
        }
        fail = cand;
        step = step.saturating_mul(2);
    };
    let (mut lo, mut hi) = (fail, pass);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pow(s: &str) -> DimensionFunction {
        s.parse().unwrap()
    }

    #[test]
    fn depth_zero_is_just_one() {
        let s = build_delta_sequence(&pow("pow:1/2"), 2, 1, 0).unwrap();
        assert_eq!(s.deltas(), &[Dyadic::pow2(0)]);
    }

    #[test]
    fn first_scale_of_linear_h_meets_geometric_bound() {
        let s = build_delta_sequence(&pow("pow:1"), 2, 1, 1).unwrap();
        assert!(s.delta(1).unwrap() <= crate::numerics::rational::rat(1, 8));
    }

    #[test]
    fn geometric_step_values() {
        assert_eq!(geometric_step(2, 1), 3);
        assert_eq!(geometric_step(3, 1), 4);
        // 4*2*√2 ≈ 11.3
        assert_eq!(geometric_step(2, 2), 4);
        assert_eq!(geometric_step(4, 1), 4);
    }

    #[test]
    fn known_prefix_for_square_root() {
        // δ1: geometric 1/8 dominates (2√δ < 1 needs δ < 1/4);
        // δ2: pair (1,2) needs 9√(2δ) < 1/2, i.e. δ < 1/648, so 2^-10.
        let s = build_delta_sequence(&pow("pow:1/2"), 2, 1, 2).unwrap();
        assert_eq!(s.exponent(1), 3);
        assert_eq!(s.exponent(2), 10);
        assert_eq!(s.transcript()[1].binding_pair, Some((1, 2)));
    }

    #[test]
    fn hand_built_sequence_validation() {
        let h = pow("pow:1/2");
        let ok = DeltaSequence::from_parts(h.clone(), 4, 1, vec![Dyadic::pow2(0), Dyadic::pow2(-4), Dyadic::pow2(-12)]);
        assert!(ok.is_ok());
        let bad = DeltaSequence::from_parts(h.clone(), 4, 1, vec![Dyadic::pow2(0), Dyadic::pow2(-3)]);
        assert!(bad.is_err());
        let not_one = DeltaSequence::from_parts(h, 4, 1, vec![Dyadic::pow2(-1)]);
        assert!(not_one.is_err());
    }

    #[test]
    fn json_round_trip_keeps_fields() {
        let s = build_delta_sequence(&pow("pow:1/2"), 2, 1, 3).unwrap();
        let j = serde_json::to_value(&s).unwrap();
        assert_eq!(j["L"], 2);
        assert_eq!(j["deltas"][0], "1*2^0");
        assert_eq!(j["enumeration"], "cantor-diagonal");
        let back: DeltaSequence = serde_json::from_value(j).unwrap();
        assert_eq!(back, s);
    }
}
