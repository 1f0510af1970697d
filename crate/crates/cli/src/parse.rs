//! Rational functions in `x` (or `θ`) over `F_q`, e.g. `1/x`, `(x+1)/x^2`, `2*x^3 - x`.
//! Integers denote elements of the prime field; `g` is the fixed generator of `F_q^×`.

use anyhow::{anyhow, bail, Result};
use ffspecial::{Fq, Poly, RationalFunction, Var};

struct Parser<'a> {
    fq: &'a Fq,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&mut self) -> Option<char> {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse()
            .map_err(|_| anyhow!("expected a number at position {start}"))
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?);
            } else if self.eat('/') {
                let d = self.power()?;
                acc = acc.div(&d).map_err(|e| anyhow!("{e}"))?;
            } else if matches!(self.peek(), Some(c) if c == '(' || c == 'x' || c == 'θ' || c == 'g' || c.is_ascii_digit())
            {
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.eat('^') {
            self.peek();
            let k = self.number()?;
            return base.pow(k as i64).map_err(|e| anyhow!("{e}"));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        let fq = self.fq;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    bail!("missing ')' at position {}", self.pos);
                }
                Ok(e)
            }
            Some('x') | Some('θ') => {
                self.pos += 1;
                Ok(RationalFunction::x(fq, Var::Theta))
            }
            Some('g') => {
                self.pos += 1;
                Ok(RationalFunction::constant(fq, Var::Theta, fq.generator()))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                Ok(RationalFunction::constant(
                    fq,
                    Var::Theta,
                    fq.from_int((n % fq.p() as u64) as i64),
                ))
            }
            Some(c) => bail!("unexpected '{c}' at position {}", self.pos),
            None => bail!("unexpected end of input"),
        }
    }
}

pub fn rational(fq: &Fq, s: &str) -> Result<RationalFunction> {
    let mut p = Parser {
        fq,
        chars: s.chars().collect(),
        pos: 0,
    };
    let r = p.expr().map_err(|e| anyhow!("cannot parse '{s}': {e}"))?;
    if p.peek().is_some() {
        bail!("cannot parse '{s}': trailing input at position {}", p.pos);
    }
    Ok(r)
}

pub fn polynomial(fq: &Fq, s: &str) -> Result<Poly> {
    let r = rational(fq, s)?;
    r.as_polynomial()
        .cloned()
        .ok_or_else(|| anyhow!("'{s}' is not a polynomial"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        let fq = Fq::new(3, 1).unwrap();
        let x = Poly::x(&fq, Var::Theta);
        let one = Poly::one(&fq, Var::Theta);
        assert_eq!(
            rational(&fq, "1/x").unwrap(),
            RationalFunction::new(one.clone(), x.clone()).unwrap()
        );
        assert_eq!(rational(&fq, "1/θ").unwrap(), rational(&fq, "1/x").unwrap());
        assert_eq!(polynomial(&fq, "x^2 + 2x + 1").unwrap(), x.add(&one).pow(2));
        assert_eq!(
            rational(&fq, "(x+1)/x^2").unwrap(),
            RationalFunction::new(x.add(&one), x.pow(2)).unwrap()
        );
        assert_eq!(polynomial(&fq, "-x").unwrap(), x.scale(fq.from_int(2)));
        assert!(rational(&fq, "1/0").is_err());
        assert!(rational(&fq, "x +").is_err());
        assert!(polynomial(&fq, "1/x").is_err());
    }
}
