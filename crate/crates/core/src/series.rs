//! Precision-tracked Laurent series in `1/θ`: the model of `k_∞ = F_q((1/θ))`.
//!
//! A series stores coefficients of `θ^{-v}` for `v0 <= v < v0 + len`; the
//! coefficients for `v0 + len <= v < prec` are known to be zero and nothing is
//! known from `prec` on. Precision `EXACT` marks a finite exact expansion
//! (a polynomial, or an exact zero).

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fq::{Fe, Fq};
use crate::poly::Poly;
use crate::rational::RationalFunction;

/// Sentinel precision for exact values.
pub const EXACT: i64 = i64::MAX / 4;

/// Precision arithmetic saturating at `EXACT`.
#[inline]
pub fn padd(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        a.saturating_add(b).min(EXACT)
    }
}

#[inline]
fn pmul(a: i64, k: i64) -> Option<i64> {
    if a >= EXACT {
        Some(EXACT)
    } else {
        a.checked_mul(k).map(|x| x.min(EXACT))
    }
}

/// The valuation `v` with `|x| = q^{-v}`; for a series with no known nonzero
/// coefficient only a lower bound is available.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Exact(i64),
    AtLeast(i64),
}

impl Valuation {
    pub fn lower(self) -> i64 {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }
    pub fn is_exact(self) -> bool {
        matches!(self, Valuation::Exact(_))
    }
    /// Whether the valuation is certainly `>= v`.
    pub fn certainly_ge(self, v: i64) -> bool {
        self.lower() >= v
    }
    pub fn to_json(self) -> Value {
        match self {
            Valuation::Exact(v) => json!({ "exact": v }),
            Valuation::AtLeast(v) if v >= EXACT => json!({ "at_least": "exact" }),
            Valuation::AtLeast(v) => json!({ "at_least": v }),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) if *v >= EXACT => write!(f, "≥ ∞"),
            Valuation::AtLeast(v) => write!(f, "≥ {v}"),
        }
    }
}

#[derive(Clone)]
pub struct PrecSeries {
    fq: Fq,
    v0: i64,
    coeffs: Vec<Fe>,
    prec: i64,
}

impl PartialEq for PrecSeries {
    fn eq(&self, o: &Self) -> bool {
        self.fq == o.fq && self.v0 == o.v0 && self.coeffs == o.coeffs && self.prec == o.prec
    }
}
impl Eq for PrecSeries {}

impl fmt::Debug for PrecSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PrecSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if parts.len() == 8 {
                parts.push("…".to_string());
                break;
            }
            parts.push(format!(
                "{}·θ^{}",
                self.fq.coeff_string(*c),
                -(self.v0 + i as i64)
            ));
        }
        if self.prec < EXACT {
            parts.push(format!("O(θ^{})", -self.prec));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl PrecSeries {
    /// Builds `Σ coeffs[i] θ^{-(v0+i)} + O(θ^{-prec})`, normalizing the representation.
    pub fn from_terms(fq: &Fq, v0: i64, mut coeffs: Vec<Fe>, prec: i64) -> PrecSeries {
        if prec < EXACT {
            let keep = (prec - v0).clamp(0, coeffs.len() as i64) as usize;
            coeffs.truncate(keep);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => PrecSeries {
                fq: fq.clone(),
                v0: prec,
                coeffs: Vec::new(),
                prec,
            },
            Some(k) => {
                coeffs.drain(..k);
                PrecSeries {
                    fq: fq.clone(),
                    v0: v0 + k as i64,
                    coeffs,
                    prec,
                }
            }
        }
    }

    pub fn zero(fq: &Fq, prec: i64) -> PrecSeries {
        Self::from_terms(fq, prec, Vec::new(), prec)
    }

    pub fn exact_zero(fq: &Fq) -> PrecSeries {
        Self::zero(fq, EXACT)
    }

    /// `c · θ^{-v}` known up to `prec`.
    pub fn monomial(fq: &Fq, c: Fe, v: i64, prec: i64) -> PrecSeries {
        Self::from_terms(fq, v, vec![c], prec)
    }

    pub fn one(fq: &Fq) -> PrecSeries {
        Self::monomial(fq, Fe::ONE, 0, EXACT)
    }

    /// `θ^k`, exact.
    pub fn theta_pow(fq: &Fq, k: i64) -> PrecSeries {
        Self::monomial(fq, Fe::ONE, -k, EXACT)
    }

    /// Exact expansion of a polynomial in `θ`.
    pub fn from_poly(p: &Poly) -> PrecSeries {
        let fq = p.field();
        match p.degree() {
            None => Self::exact_zero(fq),
            Some(d) => {
                let coeffs: Vec<Fe> = p.coeffs().iter().rev().copied().collect();
                Self::from_terms(fq, -(d as i64), coeffs, EXACT)
            }
        }
    }

    /// Expansion of a rational function to precision `prec` (exact if it is a polynomial).
    pub fn from_rational(r: &RationalFunction, prec: i64) -> PrecSeries {
        let num = Self::from_poly(r.num());
        if r.is_polynomial() {
            return num;
        }
        let w = prec + r.num().deg_i64().max(0) + 1;
        let den_inv = Self::from_poly(r.den())
            .truncate(w)
            .inv()
            .expect("nonzero denominator");
        num.mul(&den_inv).truncate(prec)
    }

    /// `1/p` to absolute precision `prec`.
    pub fn inv_poly(p: &Poly, prec: i64) -> Result<PrecSeries> {
        let d = p
            .degree()
            .ok_or_else(|| Error::DivisionByZero("series inverse of the zero polynomial".into()))?
            as i64;
        if prec <= d {
            return Ok(Self::zero(p.field(), prec));
        }
        Self::from_poly(p).truncate(prec - 2 * d).inv()
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }
    pub fn prec(&self) -> i64 {
        self.prec
    }
    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }
    /// First possibly nonzero exponent (equals `prec` for a zero series).
    pub fn v0(&self) -> i64 {
        self.v0
    }
    /// Stored coefficients, starting at `v0`.
    pub fn raw_coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn valuation(&self) -> Valuation {
        if self.coeffs.is_empty() {
            Valuation::AtLeast(self.prec)
        } else {
            Valuation::Exact(self.v0)
        }
    }

    /// Zero at the available precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `θ^{-v}`, or `None` when `v >= prec`.
    pub fn coeff(&self, v: i64) -> Option<Fe> {
        if v >= self.prec {
            return None;
        }
        if v < self.v0 {
            return Some(Fe::ZERO);
        }
        Some(
            self.coeffs
                .get((v - self.v0) as usize)
                .copied()
                .unwrap_or(Fe::ZERO),
        )
    }

    /// Sparse list of known nonzero terms `(v, c)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Fe)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, &c)| (self.v0 + i as i64, c))
    }

    pub fn leading_coeff(&self) -> Option<Fe> {
        self.coeffs.first().copied()
    }

    pub fn truncate(&self, prec: i64) -> PrecSeries {
        if prec >= self.prec {
            return self.clone();
        }
        Self::from_terms(&self.fq, self.v0, self.coeffs.clone(), prec)
    }

    fn end(&self) -> i64 {
        self.v0 + self.coeffs.len() as i64
    }

    pub fn add(&self, o: &PrecSeries) -> PrecSeries {
        let prec = self.prec.min(o.prec);
        if o.is_zero() {
            return self.truncate(prec);
        }
        if self.is_zero() {
            return o.truncate(prec);
        }
        let lo = self.v0.min(o.v0);
        let hi = self.end().max(o.end()).min(prec);
        if hi <= lo {
            return Self::zero(&self.fq, prec);
        }
        let mut c = vec![Fe::ZERO; (hi - lo) as usize];
        for (src, off) in [(self, self.v0 - lo), (o, o.v0 - lo)] {
            for (i, &x) in src.coeffs.iter().enumerate() {
                let k = off as usize + i;
                if k >= c.len() {
                    break;
                }
                c[k] = self.fq.add(c[k], x);
            }
        }
        Self::from_terms(&self.fq, lo, c, prec)
    }

    pub fn neg(&self) -> PrecSeries {
        PrecSeries {
            fq: self.fq.clone(),
            v0: self.v0,
            coeffs: self.coeffs.iter().map(|&c| self.fq.neg(c)).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, o: &PrecSeries) -> PrecSeries {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: Fe) -> PrecSeries {
        Self::from_terms(
            &self.fq,
            self.v0,
            self.coeffs.iter().map(|&c| self.fq.mul(c, s)).collect(),
            self.prec,
        )
    }

    /// Multiplication by `θ^k`.
    pub fn shift(&self, k: i64) -> PrecSeries {
        let prec = if self.is_exact() {
            EXACT
        } else {
            self.prec - k
        };
        if self.is_zero() {
            return Self::zero(&self.fq, prec);
        }
        PrecSeries {
            fq: self.fq.clone(),
            v0: self.v0 - k,
            coeffs: self.coeffs.clone(),
            prec,
        }
    }

    pub fn mul(&self, o: &PrecSeries) -> PrecSeries {
        let vx = self.v0;
        let vy = o.v0;
        let prec = padd(self.prec, vy).min(padd(o.prec, vx));
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.fq, prec);
        }
        let base = vx + vy;
        let full = self.coeffs.len() + o.coeffs.len() - 1;
        let len = if prec >= EXACT {
            full
        } else {
            ((prec - base).max(0) as usize).min(full)
        };
        let mut c = vec![Fe::ZERO; len];
        let f = &self.fq;
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            let lim = (len - i).min(o.coeffs.len());
            let row = &mut c[i..i + lim];
            for (slot, &b) in row.iter_mut().zip(&o.coeffs[..lim]) {
                if !b.is_zero() {
                    *slot = f.add(*slot, f.mul(a, b));
                }
            }
        }
        Self::from_terms(f, base, c, prec)
    }

    /// Multiplicative inverse; the relative precision is preserved.
    pub fn inv(&self) -> Result<PrecSeries> {
        if self.is_zero() {
            return Err(Error::Precision(format!(
                "cannot invert a series indistinguishable from zero ({self})"
            )));
        }
        if self.is_exact() {
            if self.coeffs.len() == 1 {
                let c = self.fq.inv(self.coeffs[0]).expect("nonzero");
                return Ok(Self::monomial(&self.fq, c, -self.v0, EXACT));
            }
            return Err(Error::Precision(
                "inverse of an exact non-monomial needs a target precision".into(),
            ));
        }
        let r = (self.prec - self.v0) as usize;
        let f = &self.fq;
        let a0_inv = f.inv(self.coeffs[0]).expect("nonzero leading coefficient");
        let mut b = vec![Fe::ZERO; r];
        b[0] = a0_inv;
        for k in 1..r {
            let mut s = Fe::ZERO;
            for i in 1..=k.min(self.coeffs.len() - 1) {
                let a = self.coeffs[i];
                if !a.is_zero() {
                    s = f.add(s, f.mul(a, b[k - i]));
                }
            }
            b[k] = f.neg(f.mul(a0_inv, s));
        }
        Ok(Self::from_terms(f, -self.v0, b, -self.v0 + r as i64))
    }

    pub fn div(&self, o: &PrecSeries) -> Result<PrecSeries> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, mut k: u64) -> PrecSeries {
        let mut acc = Self::one(&self.fq);
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

    /// Integer power (negative exponents invert first).
    pub fn powi(&self, k: i64) -> Result<PrecSeries> {
        if k >= 0 {
            Ok(self.pow(k as u64))
        } else {
            Ok(self.inv()?.pow(k.unsigned_abs()))
        }
    }

    /// Scales exponents by `factor` and maps coefficients through `cmap`,
    /// optionally capping the resulting precision.
    fn inflate_with(&self, factor: i64, cap: Option<i64>, cmap: impl Fn(Fe) -> Fe) -> PrecSeries {
        let cap_v = cap.unwrap_or(EXACT);
        let new_prec = pmul(self.prec, factor).unwrap_or(EXACT).min(cap_v);
        if self.is_zero() {
            return Self::zero(&self.fq, new_prec);
        }
        let new_v0 = match self.v0.checked_mul(factor) {
            Some(v) if v < new_prec => v,
            Some(_) => return Self::zero(&self.fq, new_prec),
            None if self.v0 > 0 => return Self::zero(&self.fq, new_prec),
            None => panic!("Frobenius twist overflows the exponent range"),
        };
        let f = factor as usize;
        let limit = if new_prec >= EXACT {
            usize::MAX
        } else {
            (new_prec - new_v0) as usize
        };
        let mut c = Vec::new();
        for (i, &x) in self.coeffs.iter().enumerate() {
            let pos = i.saturating_mul(f);
            if pos >= limit {
                break;
            }
            if c.len() < pos + 1 {
                c.resize(pos + 1, Fe::ZERO);
            }
            c[pos] = cmap(x);
        }
        Self::from_terms(&self.fq, new_v0, c, new_prec)
    }

    /// `x^{q^n}`, exact; precision becomes `q^n · prec` (then capped at `cap`).
    pub fn frobenius(&self, n: u32, cap: Option<i64>) -> PrecSeries {
        let q = self.fq.q() as i64;
        match q.checked_pow(n) {
            Some(f) => self.inflate_with(f, cap, |c| c),
            None => {
                assert!(
                    self.v0 > 0 || self.is_zero(),
                    "Frobenius twist overflows the exponent range"
                );
                Self::zero(&self.fq, cap.unwrap_or(EXACT))
            }
        }
    }

    /// `x^{p^m}` (coefficients are raised to the `p^m`-th power as well).
    pub fn pth_power(&self, m: u32, cap: Option<i64>) -> PrecSeries {
        let p = self.fq.p() as i64;
        let f = p.checked_pow(m).expect("p-power exponent in range");
        let fq = self.fq.clone();
        self.inflate_with(f, cap, move |c| fq.pow(c, f as u64))
    }

    /// Terms with exponent `θ^{-v}`, `v <= 0` (the polynomial part).
    pub fn polynomial_part(&self) -> Result<Poly> {
        if self.prec <= 0 {
            return Err(Error::Precision(
                "polynomial part not determined at this precision".into(),
            ));
        }
        let mut c = vec![Fe::ZERO; (-self.v0).max(-1).saturating_add(1) as usize];
        for (v, x) in self.terms() {
            if v <= 0 {
                c[(-v) as usize] = x;
            }
        }
        Ok(Poly::from_coeffs(&self.fq, crate::poly::Var::Theta, c))
    }

    /// The part with exponents `v >= 1` (so `|·| < 1`).
    pub fn fractional_part(&self) -> PrecSeries {
        let terms: Vec<(i64, Fe)> = self.terms().filter(|&(v, _)| v >= 1).collect();
        match terms.first() {
            None => Self::zero(&self.fq, self.prec),
            Some(&(v0, _)) => {
                let mut c = vec![Fe::ZERO; (self.end() - v0) as usize];
                for (v, x) in terms {
                    c[(v - v0) as usize] = x;
                }
                Self::from_terms(&self.fq, v0, c, self.prec)
            }
        }
    }

    /// Whether `self` and `o` agree to valuation `>= min(prec) - guard`.
    pub fn agrees_with(&self, o: &PrecSeries, guard: i64) -> bool {
        let d = self.sub(o);
        d.valuation().certainly_ge(d.prec.saturating_sub(guard))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "prec": if self.is_exact() { Value::Null } else { json!(self.prec) },
            "v0": if self.is_zero() { Value::Null } else { json!(self.v0) },
            "terms": self.terms().map(|(v, c)| json!([v, self.fq.coords(c)])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(fq: &Fq, v: &Value) -> Result<PrecSeries> {
        let bad = || Error::Parse(format!("malformed series JSON: {v}"));
        let prec = match v.get("prec") {
            Some(Value::Null) | None => EXACT,
            Some(p) => p.as_i64().ok_or_else(bad)?,
        };
        let terms = v.get("terms").and_then(Value::as_array).ok_or_else(bad)?;
        let mut acc = Self::zero(fq, EXACT);
        for t in terms {
            let pair = t.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            let e = pair[0].as_i64().ok_or_else(bad)?;
            let coords: Vec<u32> = pair[1]
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|x| x.as_u64().map(|x| x as u32).ok_or_else(bad))
                .collect::<Result<_>>()?;
            acc = acc.add(&Self::monomial(fq, fq.from_coords(&coords)?, e, EXACT));
        }
        Ok(acc.truncate(prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Var;

    fn f3() -> Fq {
        Fq::new(3, 1).unwrap()
    }

    #[test]
    fn inverse_examples() {
        let f = f3();
        let theta = PrecSeries::theta_pow(&f, 1);
        assert_eq!(theta.inv().unwrap(), PrecSeries::theta_pow(&f, -1));
        let x = PrecSeries::from_terms(&f, 0, vec![Fe(1), f.neg(Fe(1))], 10);
        let y = x.inv().unwrap();
        assert_eq!(y, PrecSeries::from_terms(&f, 0, vec![Fe(1); 10], 10));
        assert!(PrecSeries::zero(&f, 10).inv().is_err());
    }

    #[test]
    fn precision_rules() {
        let f = f3();
        let a = PrecSeries::from_terms(&f, -1, vec![Fe(1), Fe(2)], 5);
        let b = PrecSeries::from_terms(&f, 2, vec![Fe(1)], 8);
        assert_eq!(a.add(&b).prec(), 5);
        assert_eq!(a.mul(&b).prec(), 8 - 1);
        assert_eq!(a.inv().unwrap().prec(), 5 - -2);
        assert_eq!(PrecSeries::zero(&f, 7).valuation(), Valuation::AtLeast(7));
    }

    #[test]
    fn rational_expansion_and_frobenius() {
        let f = f3();
        let r = RationalFunction::new(
            Poly::one(&f, Var::Theta),
            Poly::from_ints(&f, Var::Theta, &[1, 1]),
        )
        .unwrap();
        let s = PrecSeries::from_rational(&r, 20);
        assert_eq!(s.prec(), 20);
        let back = s.mul(&PrecSeries::from_poly(&Poly::from_ints(
            &f,
            Var::Theta,
            &[1, 1],
        )));
        assert!(back.agrees_with(&PrecSeries::one(&f), 0));
        let tw = PrecSeries::theta_pow(&f, -1).frobenius(1, None);
        assert_eq!(tw, PrecSeries::theta_pow(&f, -3));
        assert!(s.frobenius(1, None).agrees_with(&s.pow(3), 0));
    }

    #[test]
    fn json_round_trip() {
        let f = Fq::new(2, 2).unwrap();
        let s = PrecSeries::from_terms(&f, -2, vec![Fe(3), Fe(0), Fe(2)], 9);
        assert_eq!(PrecSeries::from_json(&f, &s.to_json()).unwrap(), s);
    }
}
