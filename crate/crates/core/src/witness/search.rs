//! Nested-interval searches.
//!
//! Preimage mode keeps `X_k ⊆ g_k^{-1}(C_k)` with endpoints on the dyadic
//! lattice `2^-p Z`: the lower end is the least lattice point mapped to
//! `>= C.lo`, the upper end the greatest mapped to `<= C.hi`. Every point of
//! such an `X_k` is sent into `C_k`, and the endpoints are reproducible.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::certificate::{Step, Tolerances, WitnessCertificate};
use super::pattern::{Mode, PatternSpec};
use crate::construction::{grid_level, GridLevel, ScheduleEntry};
use crate::error::{Error, Result};
use crate::maps::{AffineMap, ConjugatedMap};
use crate::numerics::interval::RationalInterval;
use crate::numerics::rational::{int, pow2, Rational};

/// Retries of the tolerance ladder after the first attempt.
pub const MAX_RETRIES: u32 = 8;

pub fn search(spec: &PatternSpec) -> Result<WitnessCertificate> {
    match spec.mode {
        Mode::Preimage => search_preimage_pattern(spec),
        Mode::Image => search_image_pattern(spec),
    }
}

pub fn search_preimage_pattern(spec: &PatternSpec) -> Result<WitnessCertificate> {
    if spec.mode != Mode::Preimage {
        return Err(Error::Config("expected a preimage pattern".into()));
    }
    spec.validate()?;
    let maps = spec.conjugated()?;
    let entries = spec.schedule()?;
    let grids = entries
        .iter()
        .map(|e| grid_level(&spec.deltas, e.m as usize))
        .collect::<Result<Vec<_>>>()?;
    let last = entries.last().expect("depth >= 1").m as usize;
    let initial = spec.deltas.delta(last)? * pow2(-10);
    let mut tol = initial.clone();
    let mut last_err = None;
    for retry in 0..=MAX_RETRIES {
        let bits = bits_for(&tol);
        match preimage_attempt(&maps, &entries, &grids, bits) {
            Ok(steps) => {
                let final_interval = steps.last().expect("non-empty").x.clone();
                return Ok(WitnessCertificate {
                    spec: spec.clone(),
                    witness: final_interval.midpoint(),
                    final_interval,
                    steps,
                    tolerances: Tolerances {
                        grid_bits: bits,
                        initial,
                        used: tol,
                        retries: retry,
                    },
                });
            }
            Err(e @ (Error::Certification { .. } | Error::Bracket(_))) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        tol /= int(2);
    }
    Err(match last_err {
        Some(Error::Certification { step, reason }) => Error::Certification { step, reason },
        Some(other) => Error::Certification {
            step: 0,
            reason: other.to_string(),
        },
        None => unreachable!("loop ran at least once"),
    })
}

/// Smallest `p` with `2^-p <= tol`.
fn bits_for(tol: &Rational) -> u32 {
    let mut p = 0u32;
    while pow2(-(p as i64)) > *tol {
        p += 1;
    }
    p
}

fn lattice(j: &BigInt, bits: u32) -> Rational {
    Rational::new(j.clone(), BigInt::from(1) << bits)
}

fn floor_lattice(x: &Rational, bits: u32) -> BigInt {
    (x * Rational::from_integer(BigInt::from(1) << bits)).floor().to_integer()
}

/// Least lattice point `t >= a` with `g(t) >= c`, given `g(a) < c`.
fn least_reaching(g: &ConjugatedMap, a: &Rational, c: &Rational, bits: u32) -> Result<Rational> {
    let ga = g.enclose_point(a, &pow2(-(bits as i64) - 8))?;
    // g' >= 1/4 bounds the distance to the crossing
    let mut hi_j = floor_lattice(&(a + int(4) * (c - ga.lo()).max(Rational::zero())), bits) + 2u32;
    while !g.at_least(&lattice(&hi_j, bits), c) {
        hi_j = &hi_j * 2u32 + 1u32;
    }
    let mut lo_j = floor_lattice(a, bits);
    if g.at_least(&lattice(&lo_j, bits), c) {
        return Err(Error::Bracket("crossing below the start point".into()));
    }
    while &hi_j - &lo_j > BigInt::from(1) {
        let mid: BigInt = (&lo_j + &hi_j) >> 1u32;
        if g.at_least(&lattice(&mid, bits), c) {
            hi_j = mid;
        } else {
            lo_j = mid;
        }
    }
    Ok(lattice(&hi_j, bits))
}

/// Greatest lattice point `t` with `g(t) <= c`, given `g(a) <= c`.
fn greatest_within(g: &ConjugatedMap, a: &Rational, c: &Rational, bits: u32) -> Result<Rational> {
    let ga = g.enclose_point(a, &pow2(-(bits as i64) - 8))?;
    let mut lo_j = floor_lattice(a, bits);
    if !g.at_most(&lattice(&lo_j, bits), c) {
        return Err(Error::Bracket("start point already above target".into()));
    }
    let mut hi_j = floor_lattice(&(a + int(4) * (c - ga.lo()).max(Rational::zero())), bits) + 2u32;
    while g.at_most(&lattice(&hi_j, bits), c) {
        hi_j = &hi_j * 2u32 + 1u32;
    }
    while &hi_j - &lo_j > BigInt::from(1) {
        let mid: BigInt = (&lo_j + &hi_j) >> 1u32;
        if g.at_most(&lattice(&mid, bits), c) {
            lo_j = mid;
        } else {
            hi_j = mid;
        }
    }
    Ok(lattice(&lo_j, bits))
}

fn preimage_attempt(maps: &[ConjugatedMap], entries: &[ScheduleEntry], grids: &[GridLevel], bits: u32) -> Result<Vec<Step>> {
    let eval_tol = pow2(-(bits as i64) - 8);
    let cut = int(maps.iter().map(ConjugatedMap::threshold).max().expect("non-empty"));
    let mut steps: Vec<Step> = Vec::with_capacity(entries.len());
    for (k, (entry, grid)) in entries.iter().zip(grids).enumerate() {
        let g = &maps[entry.owner];
        let (index, start) = match steps.last() {
            None => {
                let g_cut = g.enclose_point(&cut, &eval_tol)?;
                (grid.first_starting_above(g_cut.hi()), cut.clone())
            }
            Some(prev) => {
                let below = g.enclose_point(prev.x.lo(), &eval_tol)?;
                let i = grid.first_starting_above(below.hi());
                let c = grid.interval(&i);
                // the cell must sit strictly below g(X.hi)
                if g.at_most(prev.x.hi(), c.hi()) {
                    let above = g.enclose_point(prev.x.hi(), &eval_tol)?;
                    if above.hi() <= c.hi() {
                        return Err(Error::Infeasible(format!(
                            "no level-{} interval fits inside the image of step {}",
                            entry.m,
                            k - 1
                        )));
                    }
                    return Err(Error::Certification {
                        step: k,
                        reason: "upper inclusion not certified".into(),
                    });
                }
                (i, prev.x.lo().clone())
            }
        };
        let c = grid.interval(&index);
        let lo = least_reaching(g, &start, c.lo(), bits)?;
        let hi = greatest_within(g, &start, c.hi(), bits)?;
        if lo > hi {
            return Err(Error::Certification {
                step: k,
                reason: "lattice too coarse for this interval".into(),
            });
        }
        let x = RationalInterval::new(lo, hi)?;
        if let Some(prev) = steps.last() {
            if !x.is_strict_subset_of(&prev.x) {
                return Err(Error::Certification {
                    step: k,
                    reason: "nesting not strict".into(),
                });
            }
        }
        steps.push(Step {
            m: entry.m,
            owner: entry.owner,
            grid_index: index,
            c,
            x,
        });
    }
    Ok(steps)
}

/// `y = s λ x + b`.
pub(crate) fn conjugated_affine(f: &AffineMap) -> (Rational, Rational) {
    let lambda = f.lambda.as_ref().expect("conjugated").to_rational();
    (&f.slope * lambda, f.intercept.clone())
}

fn affine_image(slope: &Rational, b: &Rational, c: &RationalInterval) -> RationalInterval {
    RationalInterval::hull(slope * c.lo() + b, slope * c.hi() + b)
}

fn affine_preimage(slope: &Rational, b: &Rational, y: &RationalInterval) -> RationalInterval {
    RationalInterval::hull((y.lo() - b) / slope, (y.hi() - b) / slope)
}

pub fn search_image_pattern(spec: &PatternSpec) -> Result<WitnessCertificate> {
    if spec.mode != Mode::Image {
        return Err(Error::Config("expected an image pattern".into()));
    }
    spec.validate()?;
    let maps: Vec<(Rational, Rational)> = spec.affines()?.iter().map(conjugated_affine).collect();
    let entries = spec.schedule()?;
    let l = int(spec.deltas.L() as i64);
    // every preimage coordinate must stay at or beyond L
    let increasing = maps[0].0.is_positive();
    let edges = maps.iter().map(|(s, b)| s * &l + b);
    let cut = if increasing {
        edges.max()
    } else {
        edges.min()
    }
    .expect("non-empty");
    let mut steps: Vec<Step> = Vec::with_capacity(entries.len());
    for (k, entry) in entries.iter().enumerate() {
        let grid = grid_level(&spec.deltas, entry.m as usize)?;
        let (s, b) = &maps[entry.owner];
        let index = match steps.last() {
            None => grid.first_starting_above(&((&cut - b) / s)),
            Some(prev) => {
                let z = affine_preimage(s, b, &prev.x);
                let i = grid.first_starting_above(z.lo());
                if grid.interval(&i).hi() >= z.hi() {
                    return Err(Error::Infeasible(format!(
                        "no level-{} interval fits inside the preimage of step {}",
                        entry.m,
                        k - 1
                    )));
                }
                i
            }
        };
        let c = grid.interval(&index);
        let x = affine_image(s, b, &c);
        steps.push(Step {
            m: entry.m,
            owner: entry.owner,
            grid_index: index,
            c,
            x,
        });
    }
    let final_interval = steps.last().expect("depth >= 1").x.clone();
    Ok(WitnessCertificate {
        spec: spec.clone(),
        witness: final_interval.midpoint(),
        final_interval,
        steps,
        tolerances: Tolerances {
            grid_bits: 0,
            initial: Rational::zero(),
            used: Rational::zero(),
            retries: 0,
        },
    })
}
