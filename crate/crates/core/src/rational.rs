//! Elements of `F_q(x)` in lowest terms with monic denominator.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fq::{Fe, Fq};
use crate::poly::{Poly, Var};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl From<Poly> for RationalFunction {
    fn from(p: Poly) -> Self {
        let den = Poly::one(p.field(), p.var());
        RationalFunction { num: p, den }
    }
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<RationalFunction> {
        if den.is_zero() {
            return Err(Error::DivisionByZero(
                "rational function with zero denominator".into(),
            ));
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_zero() || g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g)?, den.exact_div(&g)?)
        };
        if n.is_zero() {
            d = Poly::one(d.field(), d.var());
        }
        let li = d.field().inv(d.leading()).expect("nonzero");
        n = n.scale(li);
        d = d.scale(li);
        Ok(RationalFunction { num: n, den: d })
    }

    pub fn zero(fq: &Fq, var: Var) -> Self {
        Poly::zero(fq, var).into()
    }
    pub fn one(fq: &Fq, var: Var) -> Self {
        Poly::one(fq, var).into()
    }
    pub fn constant(fq: &Fq, var: Var, c: Fe) -> Self {
        Poly::constant(fq, var, c).into()
    }
    pub fn x(fq: &Fq, var: Var) -> Self {
        Poly::x(fq, var).into()
    }
    /// `x^k` for any integer `k`.
    pub fn x_pow(fq: &Fq, var: Var, k: i64) -> Self {
        let m = Poly::monomial(fq, var, Fe::ONE, k.unsigned_abs() as usize);
        if k >= 0 {
            m.into()
        } else {
            RationalFunction {
                num: Poly::one(fq, var),
                den: m,
            }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }
    pub fn den(&self) -> &Poly {
        &self.den
    }
    pub fn field(&self) -> &Fq {
        self.num.field()
    }
    pub fn var(&self) -> Var {
        self.num.var()
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }
    pub fn as_polynomial(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    /// `deg num - deg den`, i.e. minus the valuation at infinity. `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.num.deg_i64() - self.den.deg_i64())
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone()).expect("nonzero den");
        }
        Self::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
        .expect("nonzero den")
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero den")
    }
    pub fn scale(&self, c: Fe) -> Self {
        Self::new(self.num.scale(c), self.den.clone()).expect("nonzero den")
    }
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("inverse of zero".into()));
        }
        Self::new(self.den.clone(), self.num.clone())
    }
    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }
    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let e = k.unsigned_abs();
        Ok(RationalFunction {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    /// `self^{q^n}` (exact: `x -> x^{q^n}` on numerator and denominator).
    pub fn frobenius(&self, n: u32) -> Self {
        RationalFunction {
            num: self.num.frobenius(n),
            den: self.den.frobenius(n),
        }
    }

    /// Substitutes `x -> x^k` in both numerator and denominator.
    pub fn inflate(&self, k: usize) -> Self {
        RationalFunction {
            num: self.num.inflate(k),
            den: self.den.inflate(k),
        }
    }

    /// Inverse of `inflate(s)` when possible.
    pub fn deflate(&self, s: usize) -> Option<Self> {
        Some(RationalFunction {
            num: self.num.deflate(s)?,
            den: self.den.deflate(s)?,
        })
    }

    pub fn with_var(&self, var: Var) -> Self {
        RationalFunction {
            num: self.num.clone().with_var(var),
            den: self.den.clone().with_var(var),
        }
    }

    /// Splits `self = a + r` with `a` a polynomial and `deg r < 0`.
    pub fn integer_part(&self) -> (Poly, RationalFunction) {
        let (q, r) = self.num.divrem(&self.den).expect("nonzero den");
        (q, Self::new(r, self.den.clone()).expect("nonzero den"))
    }

    pub fn to_json(&self) -> Value {
        json!({ "num": self.num.to_json(), "den": self.den.to_json(), "text": self.to_string() })
    }

    pub fn from_json(fq: &Fq, v: &Value) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed rational JSON: {v}"));
        Self::new(
            Poly::from_json(fq, v.get("num").ok_or_else(bad)?)?,
            Poly::from_json(fq, v.get("den").ok_or_else(bad)?)?,
        )
    }
}
