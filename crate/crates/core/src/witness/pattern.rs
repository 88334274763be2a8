//! Patterns to be found inside the truncated sets: a list of maps, one rank
//! per map, and the scale sequence that fixes the grids.

use serde::{Deserialize, Serialize};

use crate::construction::{check_nesting_fit, schedule, DeltaSequence, ScheduleEntry};
use crate::error::{Error, Result};
use crate::maps::{choose_conjugator, compute_threshold, conjugate_bilipschitz, AffineMap, ConjugatedMap, Conjugator, Polynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `t` with `P_i(t)` in the set for every map
    Preimage,
    /// `y` with `f_i^{-1}(y)` in the set for every map
    Image,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PatternMap {
    Polynomial {
        poly: Polynomial,
        psi: Conjugator,
        threshold: i64,
    },
    Affine(AffineMap),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub mode: Mode,
    pub maps: Vec<PatternMap>,
    /// `r(i)` for each map
    pub ranks: Vec<u32>,
    pub deltas: DeltaSequence,
    pub depth: usize,
}

impl PatternSpec {
    /// Polynomial pattern; ranks default to `1, 2, ...`.
    pub fn preimage(polys: &[Polynomial], ranks: Option<Vec<u32>>, deltas: DeltaSequence, depth: usize) -> Result<Self> {
        let mut maps = Vec::with_capacity(polys.len());
        for p in polys {
            let cm = compute_threshold(p, &choose_conjugator(p))?;
            maps.push(PatternMap::Polynomial {
                poly: p.clone(),
                psi: cm.psi().clone(),
                threshold: cm.threshold(),
            });
        }
        Self::assemble(Mode::Preimage, maps, ranks, deltas, depth)
    }

    /// Affine pattern; each map gets its linear conjugator for the sequence's `L`.
    pub fn image(affines: &[AffineMap], ranks: Option<Vec<u32>>, deltas: DeltaSequence, depth: usize) -> Result<Self> {
        let maps = affines
            .iter()
            .map(|f| conjugate_bilipschitz(f, deltas.L()).map(PatternMap::Affine))
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(Mode::Image, maps, ranks, deltas, depth)
    }

    fn assemble(mode: Mode, maps: Vec<PatternMap>, ranks: Option<Vec<u32>>, deltas: DeltaSequence, depth: usize) -> Result<Self> {
        let ranks = ranks.unwrap_or_else(|| (1..=maps.len() as u32).collect());
        let spec = PatternSpec {
            mode,
            maps,
            ranks,
            deltas,
            depth,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Shape checks shared by search and verification.
    pub fn validate(&self) -> Result<()> {
        if self.maps.is_empty() {
            return Err(Error::Config("pattern has no maps".into()));
        }
        if self.ranks.len() != self.maps.len() {
            return Err(Error::Config("one rank per map is required".into()));
        }
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        if self.deltas.N() != 1 {
            return Err(Error::Config("witness search works on the line (N = 1)".into()));
        }
        self.deltas.validate()?;
        let kinds_ok = self.maps.iter().all(|m| {
            matches!(
                (self.mode, m),
                (Mode::Preimage, PatternMap::Polynomial { .. }) | (Mode::Image, PatternMap::Affine(_))
            )
        });
        if !kinds_ok {
            return Err(Error::Config("map kinds do not match the mode".into()));
        }
        if self.mode == Mode::Image {
            let signs: Vec<bool> = self
                .maps
                .iter()
                .map(|m| match m {
                    PatternMap::Affine(f) => f.slope > num_traits::Zero::zero(),
                    _ => unreachable!(),
                })
                .collect();
            if signs.iter().any(|s| *s != signs[0]) {
                return Err(Error::Config("affine slopes must share one sign".into()));
            }
        }
        let entries = self.schedule()?;
        let top = entries.last().map_or(0, |e| e.m as usize);
        if top > self.deltas.depth() {
            return Err(Error::Index {
                index: top,
                len: self.deltas.deltas().len(),
            });
        }
        if let Err(i) = check_nesting_fit(&self.deltas, &entries) {
            return Err(Error::Infeasible(format!(
                "levels {} and {} violate the nesting fit",
                entries[i].m,
                entries[i + 1].m
            )));
        }
        Ok(())
    }

    pub fn schedule(&self) -> Result<Vec<ScheduleEntry>> {
        schedule(&self.ranks, self.depth)
    }

    /// Certified conjugated maps, in map order.
    pub fn conjugated(&self) -> Result<Vec<ConjugatedMap>> {
        self.maps
            .iter()
            .map(|m| match m {
                PatternMap::Polynomial { poly, psi, threshold } => {
                    let cm = compute_threshold(poly, psi)?;
                    if cm.threshold() != *threshold {
                        return Err(Error::Config(format!("recorded threshold {threshold} for {poly} is not the certified one")));
                    }
                    Ok(cm)
                }
                PatternMap::Affine(_) => Err(Error::Config("affine map in a polynomial pattern".into())),
            })
            .collect()
    }

    pub fn affines(&self) -> Result<Vec<AffineMap>> {
        self.maps
            .iter()
            .map(|m| match m {
                PatternMap::Affine(f) if f.lambda.is_some() => Ok(f.clone()),
                _ => Err(Error::Config("image patterns need conjugated affine maps".into())),
            })
            .collect()
    }
}
