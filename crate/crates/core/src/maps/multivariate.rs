//! Polynomials in `x1..xN` and their reduction to one variable along a ray
//! `(t, λ_2 t, ..., λ_N t)`.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::parse::parse_terms;
use super::polynomial::Polynomial;
use crate::error::{Error, Result};
use crate::numerics::rational::{int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPolynomial {
    nvars: usize,
    /// exponent vector -> coefficient, zero coefficients dropped
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPolynomial {
    pub fn new(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::Config("need at least one variable".into()));
        }
        let mut map: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Config("exponent vector of wrong length".into()));
            }
            *map.entry(e).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let p = MultiPolynomial { nvars, terms: map };
        if p.total_degree() == 0 {
            return Err(Error::Config("pattern polynomials must be non-constant".into()));
        }
        Ok(p)
    }

    /// Parses text in the variables `x1..xN`.
    pub fn parse_line(text: &str, nvars: usize, line: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for (powers, c) in parse_terms(text, line)? {
            let mut e = vec![0u32; nvars];
            for (name, k) in powers {
                let idx = name
                    .strip_prefix('x')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&i| i >= 1 && i <= nvars)
                    .ok_or_else(|| Error::Parse {
                        line,
                        column: text.find(&name).map_or(1, |i| i + 1),
                        message: format!("unknown variable {name:?}, expected x1..x{nvars}"),
                    })?;
                e[idx - 1] += k;
            }
            terms.push((e, c));
        }
        MultiPolynomial::new(nvars, terms).map_err(|e| Error::Parse {
            line,
            column: 1,
            message: e.to_string(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Top-degree form at `(1, λ_2, ..., λ_N)`.
    pub fn top_form(&self, lambdas: &[Rational]) -> Rational {
        let d = self.total_degree();
        self.terms
            .iter()
            .filter(|(e, _)| e.iter().sum::<u32>() == d)
            .map(|(e, c)| c * ray_weight(e, lambdas))
            .sum()
    }

    /// `P(t, λ_2 t, ..., λ_N t)`.
    pub fn substitute(&self, lambdas: &[Rational]) -> Result<Polynomial> {
        let mut coeffs = vec![Rational::zero(); self.total_degree() as usize + 1];
        for (e, c) in &self.terms {
            let deg = e.iter().sum::<u32>() as usize;
            coeffs[deg] += c * ray_weight(e, lambdas);
        }
        Polynomial::new(coeffs)
    }
}

fn ray_weight(e: &[u32], lambdas: &[Rational]) -> Rational {
    e.iter()
        .skip(1)
        .zip(lambdas)
        .map(|(&k, l)| num_traits::pow(l.clone(), k as usize))
        .fold(int(1), |a, b| a * b)
}

/// Searches `(λ_2..λ_N)` over `{1..r}^(N-1)` for `r = 1, 2, ...`,
/// lexicographically among tuples with maximum `r`, until every top form is
/// non-zero.
pub fn reduce_multivariate(polys: &[MultiPolynomial]) -> Result<(Vec<Rational>, Vec<Polynomial>)> {
    let Some(first) = polys.first() else {
        return Err(Error::Config("no polynomials to reduce".into()));
    };
    let n = first.nvars;
    if polys.iter().any(|p| p.nvars != n) {
        return Err(Error::Config("polynomials use different numbers of variables".into()));
    }
    let free = n - 1;
    for r in 1u64.. {
        let mut tuple = vec![1u64; free];
        loop {
            if free == 0 || tuple.contains(&r) {
                let lambdas: Vec<Rational> = tuple.iter().map(|&v| int(v as i64)).collect();
                if polys.iter().all(|p| !p.top_form(&lambdas).is_zero()) {
                    let uni = polys
                        .iter()
                        .map(|p| p.substitute(&lambdas))
                        .collect::<Result<Vec<_>>>()?;
                    return Ok((lambdas, uni));
                }
            }
            if !advance(&mut tuple, r) {
                break;
            }
        }
    }
    unreachable!("finitely many non-zero forms cannot vanish on all of ℕ^(N-1)")
}

/// Next tuple in `{1..r}^k`, lexicographic.
fn advance(t: &mut [u64], r: u64) -> bool {
    for i in (0..t.len()).rev() {
        if t[i] < r {
            t[i] += 1;
            for v in &mut t[i + 1..] {
                *v = 1;
            }
            return true;
        }
    }
    false
}
