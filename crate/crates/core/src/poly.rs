//! Dense univariate polynomials over `F_q`.

use std::cmp::Ordering;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fq::{Fe, Fq};

/// Name of the indeterminate. Only affects display and serialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Theta,
    T,
    Z,
    U,
}

impl Var {
    pub fn label(self) -> &'static str {
        match self {
            Var::Theta => "θ",
            Var::T => "t",
            Var::Z => "z",
            Var::U => "u",
        }
    }

    pub fn from_label(s: &str) -> Result<Var> {
        match s {
            "θ" | "theta" | "x" => Ok(Var::Theta),
            "t" => Ok(Var::T),
            "z" => Ok(Var::Z),
            "u" => Ok(Var::U),
            _ => Err(Error::Parse(format!("unknown variable {s:?}"))),
        }
    }
}

#[derive(Clone)]
pub struct Poly {
    fq: Fq,
    var: Var,
    coeffs: Vec<Fe>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.var == other.var
    }
}
impl Eq for Poly {}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.var.hash(state);
        self.coeffs.hash(state);
    }
}

/// Degree first, then coefficients from the top down.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}
impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let v = self.var.label();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = self.fq.coeff_string(*c);
            match (i, c.0 == 1) {
                (0, _) => write!(f, "{cs}")?,
                (1, true) => write!(f, "{v}")?,
                (1, false) => write!(f, "{cs}*{v}")?,
                (_, true) => write!(f, "{v}^{i}")?,
                (_, false) => write!(f, "{cs}*{v}^{i}")?,
            }
        }
        Ok(())
    }
}

impl Fq {
    /// Integer for prime fields, coordinate tuple otherwise.
    pub(crate) fn coeff_string(&self, c: Fe) -> String {
        if self.e() == 1 {
            c.0.to_string()
        } else {
            format!("{:?}", self.coords(c))
        }
    }
}

impl Poly {
    pub fn zero(fq: &Fq, var: Var) -> Poly {
        Poly {
            fq: fq.clone(),
            var,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(fq: &Fq, var: Var, c: Fe) -> Poly {
        Poly::from_coeffs(fq, var, vec![c])
    }

    pub fn one(fq: &Fq, var: Var) -> Poly {
        Poly::constant(fq, var, Fe::ONE)
    }

    /// The indeterminate itself.
    pub fn x(fq: &Fq, var: Var) -> Poly {
        Poly::monomial(fq, var, Fe::ONE, 1)
    }

    pub fn monomial(fq: &Fq, var: Var, c: Fe, k: usize) -> Poly {
        let mut coeffs = vec![Fe::ZERO; k + 1];
        coeffs[k] = c;
        Poly::from_coeffs(fq, var, coeffs)
    }

    pub fn from_coeffs(fq: &Fq, var: Var, mut coeffs: Vec<Fe>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly {
            fq: fq.clone(),
            var,
            coeffs,
        }
    }

    /// Convenience constructor from small integers reduced into `F_p`.
    pub fn from_ints(fq: &Fq, var: Var, ints: &[i64]) -> Poly {
        Poly::from_coeffs(fq, var, ints.iter().map(|&n| fq.from_int(n)).collect())
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }
    pub fn var(&self) -> Var {
        self.var
    }
    pub fn with_var(mut self, var: Var) -> Poly {
        self.var = var;
        self
    }
    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Fe::ONE
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `-1` standing in for the zero polynomial.
    pub fn deg_i64(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fe::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn monic(&self) -> Poly {
        match self.fq.inv(self.leading()) {
            Some(li) => self.scale(li),
            None => self.clone(),
        }
    }

    fn like(&self, coeffs: Vec<Fe>) -> Poly {
        Poly::from_coeffs(&self.fq, self.var, coeffs)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| self.fq.add(self.coeff(i), other.coeff(i)))
            .collect();
        self.like(c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| self.fq.sub(self.coeff(i), other.coeff(i)))
            .collect();
        self.like(c)
    }

    pub fn neg(&self) -> Poly {
        self.like(self.coeffs.iter().map(|&c| self.fq.neg(c)).collect())
    }

    pub fn scale(&self, s: Fe) -> Poly {
        self.like(self.coeffs.iter().map(|&c| self.fq.mul(c, s)).collect())
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![Fe::ZERO; k];
        c.extend_from_slice(&self.coeffs);
        self.like(c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return self.like(Vec::new());
        }
        let f = &self.fq;
        let mut out = vec![Fe::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
        }
        self.like(out)
    }

    pub fn pow(&self, mut k: u64) -> Poly {
        let mut acc = Poly::one(&self.fq, self.var);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Euclidean division. Errors on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d
            .degree()
            .ok_or_else(|| Error::DivisionByZero("polynomial division".into()))?;
        let f = &self.fq;
        let inv_lc = f.inv(d.leading()).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((self.like(Vec::new()), self.clone()));
        }
        let mut quot = vec![Fe::ZERO; r.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = f.mul(r[k + dd], inv_lc);
            quot[k] = c;
            if c.is_zero() {
                continue;
            }
            for (i, &dc) in d.coeffs.iter().enumerate() {
                r[k + i] = f.sub(r[k + i], f.mul(c, dc));
            }
        }
        r.truncate(dd);
        Ok((self.like(quot), self.like(r)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.divrem(d)?.1)
    }

    /// Division that must be exact.
    pub fn exact_div(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(d)?;
        if !r.is_zero() {
            return Err(Error::Invalid(format!("{d} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `g = s*self + t*other`, `g` monic.
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let zero = self.like(Vec::new());
        let one = Poly::one(&self.fq, self.var);
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (one.clone(), zero.clone());
        let (mut t0, mut t1) = (zero, one);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        match self.fq.inv(r0.leading()) {
            Some(li) => (r0.scale(li), s0.scale(li), t0.scale(li)),
            None => (r0, s0, t0),
        }
    }

    /// Inverse modulo `m`, if `gcd(self, m) = 1`.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        let (g, s, _) = self.xgcd(m);
        if g.is_one() {
            Some(s.rem(m).expect("nonzero modulus"))
        } else {
            None
        }
    }

    pub fn mulmod(&self, other: &Poly, m: &Poly) -> Poly {
        self.mul(other).rem(m).expect("nonzero modulus")
    }

    pub fn powmod(&self, mut k: u64, m: &Poly) -> Poly {
        let mut acc = Poly::one(&self.fq, self.var)
            .rem(m)
            .expect("nonzero modulus");
        let mut base = self.rem(m).expect("nonzero modulus");
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mulmod(&base, m);
            }
            k >>= 1;
            if k > 0 {
                base = base.mulmod(&base, m);
            }
        }
        acc
    }

    pub fn eval(&self, x: Fe) -> Fe {
        self.coeffs
            .iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| self.fq.add(self.fq.mul(acc, x), c))
    }

    /// Substitution `x -> other` (composition `self(other)`).
    pub fn compose(&self, other: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.fq, other.var);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(other).add(&Poly::constant(&self.fq, other.var, c));
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.fq.mul(c, self.fq.from_int(i as i64)))
            .collect();
        self.like(c)
    }

    /// `x -> x^k` substitution.
    pub fn inflate(&self, k: usize) -> Poly {
        if self.is_zero() || k == 1 {
            return self.clone();
        }
        let mut c = vec![Fe::ZERO; (self.coeffs.len() - 1) * k + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            c[i * k] = a;
        }
        self.like(c)
    }

    /// `self^{q^n}`, which over `F_q` equals `self(x^{q^n})`.
    pub fn frobenius(&self, n: u32) -> Poly {
        self.inflate((self.fq.q() as usize).pow(n))
    }

    /// The `p`-th root of a polynomial in `x^p`, or `None`.
    pub fn pth_root(&self) -> Option<Poly> {
        let p = self.fq.p() as usize;
        if self
            .coeffs
            .iter()
            .enumerate()
            .any(|(i, c)| i % p != 0 && !c.is_zero())
        {
            return None;
        }
        let c = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|&c| self.fq.pth_root(c))
            .collect();
        Some(self.like(c))
    }

    /// Polynomial with the `x^{k}` coefficients for `k ≡ 0 mod s` compressed: `x^{sk} -> x^k`.
    pub fn deflate(&self, s: usize) -> Option<Poly> {
        if self
            .coeffs
            .iter()
            .enumerate()
            .any(|(i, c)| i % s != 0 && !c.is_zero())
        {
            return None;
        }
        Some(self.like(self.coeffs.iter().step_by(s).copied().collect()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "var": self.var.label(),
            "coeffs": self.coeffs.iter().map(|&c| self.fq.coords(c)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(fq: &Fq, v: &Value) -> Result<Poly> {
        let bad = || Error::Parse(format!("malformed polynomial JSON: {v}"));
        let var = Var::from_label(v.get("var").and_then(Value::as_str).ok_or_else(bad)?)?;
        let arr = v.get("coeffs").and_then(Value::as_array).ok_or_else(bad)?;
        let mut coeffs = Vec::with_capacity(arr.len());
        for c in arr {
            let coords: Vec<u32> = c
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|x| x.as_u64().map(|x| x as u32).ok_or_else(bad))
                .collect::<Result<_>>()?;
            coeffs.push(fq.from_coords(&coords)?);
        }
        Ok(Poly::from_coeffs(fq, var, coeffs))
    }
}
