//! Reader for polynomial text such as `3/2 - x + 2*x^3` or `x1*x2 - 5/7*x2^2`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numerics::rational::{int, Rational};

/// A parsed sum of monomials: exponent per variable name, and coefficient.
pub(crate) type Terms = Vec<(BTreeMap<String, u32>, Rational)>;

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii")
    }

    /// `123`, `1.25`, or `3/4`.
    fn number(&mut self) -> Result<Rational> {
        self.skip_ws();
        let whole = self.digits().to_string();
        if whole.is_empty() {
            return Err(self.err("expected a number"));
        }
        let mut value: Rational = Rational::from_integer(whole.parse().map_err(|_| self.err("bad integer"))?);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let frac = self.digits().to_string();
            if frac.is_empty() {
                return Err(self.err("expected digits after decimal point"));
            }
            let scale = num_traits::pow(num_bigint::BigInt::from(10), frac.len());
            value += Rational::new(frac.parse().map_err(|_| self.err("bad fraction"))?, scale);
        }
        if self.peek() == Some(b'/') {
            let slash = self.pos;
            self.pos += 1;
            self.skip_ws();
            let den = self.digits().to_string();
            if den.is_empty() {
                return Err(self.err("expected denominator"));
            }
            let den: Rational = Rational::from_integer(den.parse().map_err(|_| self.err("bad denominator"))?);
            if den.is_zero() {
                self.pos = slash;
                return Err(self.err("zero denominator"));
            }
            value /= den;
        }
        Ok(value)
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string()
    }

    /// factor ('*' factor)*
    fn term(&mut self) -> Result<(BTreeMap<String, u32>, Rational)> {
        let mut coef = int(1);
        let mut powers = BTreeMap::new();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => coef *= self.number()?,
                Some(c) if c.is_ascii_alphabetic() => {
                    let name = self.ident();
                    let mut e = 1u32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.skip_ws();
                        let d = self.digits().to_string();
                        e = d.parse().map_err(|_| self.err("expected exponent"))?;
                    }
                    *powers.entry(name).or_insert(0) += e;
                }
                Some(_) => return Err(self.err("expected a number or variable")),
                None => return Err(self.err("unexpected end of input")),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok((powers, coef));
            }
        }
    }
}

pub(crate) fn parse_terms(text: &str, line: usize) -> Result<Terms> {
    let mut c = Cursor {
        src: text.as_bytes(),
        pos: 0,
        line,
    };
    let mut out = Vec::new();
    let mut sign = int(1);
    match c.peek() {
        Some(b'-') => {
            sign = int(-1);
            c.pos += 1;
        }
        Some(b'+') => c.pos += 1,
        None => return Err(c.err("empty polynomial")),
        _ => {}
    }
    loop {
        let (powers, coef) = c.term()?;
        out.push((powers, coef * &sign));
        match c.peek() {
            None => return Ok(out),
            Some(b'+') => sign = int(1),
            Some(b'-') => sign = int(-1),
            Some(_) => return Err(c.err("expected '+' or '-'")),
        }
        c.pos += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rat;

    #[test]
    fn reads_signs_and_fractions() {
        let t = parse_terms("-3/4 + 2*x - x^2", 1).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0].1, rat(-3, 4));
        assert_eq!(t[2].0.get("x"), Some(&2));
        assert_eq!(t[2].1, rat(-1, 1));
    }

    #[test]
    fn decimals_are_exact() {
        let t = parse_terms("1.25*x", 1).unwrap();
        assert_eq!(t[0].1, rat(5, 4));
    }

    #[test]
    fn error_positions() {
        match parse_terms("x + * 2", 7) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 7);
                assert_eq!(column, 5);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_terms("1/0", 1), Err(Error::Parse { column: 2, .. })));
        assert!(matches!(parse_terms("", 1), Err(Error::Parse { .. })));
    }
}
