//! Exact scalars in `k(θ̃)` and its level-1 extension `F_q(u)(θ̃)`, `θ = u^q`.
//!
//! An element is a vector of `q-1` rational functions over the basis
//! `1, θ̃, …, θ̃^{q-2}` with `θ̃^{q-1} = -θ`. For `q = 2` the basis has a single
//! element and `θ̃ = -θ = θ`.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fq::{Fe, Fq};
use crate::poly::{Poly, Var};
use crate::rational::RationalFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    /// Base variable `θ`.
    Zero,
    /// Base variable `u` with `θ = u^q`.
    One,
}

impl Level {
    fn var(self) -> Var {
        match self {
            Level::Zero => Var::Theta,
            Level::One => Var::U,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TowerScalar {
    level: Level,
    comps: Vec<RationalFunction>,
}

impl fmt::Debug for TowerScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TowerScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(match i {
                0 => format!("{c}"),
                1 => format!("({c})*θ̃"),
                _ => format!("({c})*θ̃^{i}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl TowerScalar {
    pub fn basis_len(fq: &Fq) -> usize {
        fq.q() as usize - 1
    }

    pub fn zero(fq: &Fq, level: Level) -> Self {
        let n = Self::basis_len(fq);
        TowerScalar {
            level,
            comps: vec![RationalFunction::zero(fq, level.var()); n],
        }
    }

    pub fn from_rational(r: &RationalFunction, level: Level) -> Self {
        let fq = r.field();
        let mut s = Self::zero(fq, level);
        s.comps[0] = match level {
            Level::Zero => r.with_var(Var::Theta),
            Level::One => r.with_var(Var::U),
        };
        s
    }

    pub fn from_poly(p: &Poly) -> Self {
        Self::from_rational(&p.clone().into(), Level::Zero)
    }

    pub fn one(fq: &Fq, level: Level) -> Self {
        Self::from_rational(&RationalFunction::one(fq, level.var()), level)
    }

    pub fn constant(fq: &Fq, level: Level, c: Fe) -> Self {
        Self::from_rational(&RationalFunction::constant(fq, level.var(), c), level)
    }

    /// `θ` at the given level (`u^q` at level 1).
    pub fn theta(fq: &Fq, level: Level) -> Self {
        let r = match level {
            Level::Zero => RationalFunction::x(fq, Var::Theta),
            Level::One => RationalFunction::x_pow(fq, Var::U, fq.q() as i64),
        };
        Self::from_rational(&r, level)
    }

    /// `u`, the chosen `q`-th root of `θ`.
    pub fn u(fq: &Fq) -> Self {
        Self::from_rational(&RationalFunction::x(fq, Var::U), Level::One)
    }

    pub fn theta_tilde(fq: &Fq, level: Level) -> Self {
        let n = Self::basis_len(fq);
        if n == 1 {
            return Self::theta(fq, level).neg();
        }
        let mut s = Self::zero(fq, level);
        s.comps[1] = RationalFunction::one(fq, level.var());
        s
    }

    /// `c · θ̃^j` for `0 <= j < q-1`.
    pub fn monomial(c: &RationalFunction, j: usize, level: Level) -> Self {
        let fq = c.field();
        let mut s = Self::zero(fq, level);
        s.comps[j] = c.with_var(level.var());
        s
    }

    pub fn level(&self) -> Level {
        self.level
    }
    pub fn components(&self) -> &[RationalFunction] {
        &self.comps
    }
    pub fn field(&self) -> &Fq {
        self.comps[0].field()
    }
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(RationalFunction::is_zero)
    }

    fn theta_base(&self) -> RationalFunction {
        match self.level {
            Level::Zero => RationalFunction::x(self.field(), Var::Theta),
            Level::One => RationalFunction::x_pow(self.field(), Var::U, self.field().q() as i64),
        }
    }

    /// Brings both operands to a common level.
    fn align(&self, o: &Self) -> (Self, Self) {
        match (self.level, o.level) {
            (Level::Zero, Level::One) => (self.to_level1(), o.clone()),
            (Level::One, Level::Zero) => (self.clone(), o.to_level1()),
            _ => (self.clone(), o.clone()),
        }
    }

    /// Embeds a level-0 element into level 1 via `θ -> u^q`.
    pub fn to_level1(&self) -> Self {
        match self.level {
            Level::One => self.clone(),
            Level::Zero => {
                let q = self.field().q() as usize;
                TowerScalar {
                    level: Level::One,
                    comps: self
                        .comps
                        .iter()
                        .map(|c| c.inflate(q).with_var(Var::U))
                        .collect(),
                }
            }
        }
    }

    /// Descends to level 0 when every component is a function of `u^q`.
    pub fn to_level0(&self) -> Option<Self> {
        match self.level {
            Level::Zero => Some(self.clone()),
            Level::One => {
                let q = self.field().q() as usize;
                let comps = self
                    .comps
                    .iter()
                    .map(|c| c.deflate(q).map(|d| d.with_var(Var::Theta)))
                    .collect::<Option<Vec<_>>>()?;
                Some(TowerScalar {
                    level: Level::Zero,
                    comps,
                })
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        TowerScalar {
            level: a.level,
            comps: a
                .comps
                .iter()
                .zip(&b.comps)
                .map(|(x, y)| x.add(y))
                .collect(),
        }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> Self {
        TowerScalar {
            level: self.level,
            comps: self.comps.iter().map(RationalFunction::neg).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        let n = a.comps.len();
        let fq = a.field().clone();
        let minus_theta = a.theta_base().neg();
        let mut out = vec![RationalFunction::zero(&fq, a.level.var()); n];
        for (i, x) in a.comps.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.comps.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let mut prod = x.mul(y);
                let mut k = i + j;
                if k >= n {
                    k -= n;
                    prod = prod.mul(&minus_theta);
                }
                out[k] = out[k].add(&prod);
            }
        }
        TowerScalar {
            level: a.level,
            comps: out,
        }
    }

    pub fn scale(&self, r: &RationalFunction) -> Self {
        self.mul(&Self::from_rational(r, self.level))
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = Self::one(self.field(), self.level);
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

    /// The single nonzero component, if there is exactly one.
    pub fn as_monomial(&self) -> Option<(usize, &RationalFunction)> {
        let mut nz = self.comps.iter().enumerate().filter(|(_, c)| !c.is_zero());
        let first = nz.next()?;
        nz.next().is_none().then_some(first)
    }

    /// Inverse of a monomial `c θ̃^j`; general elements are rejected.
    pub fn inv(&self) -> Result<Self> {
        let (j, c) = self
            .as_monomial()
            .ok_or_else(|| Error::NotInvertible(format!("{self} is not a θ̃-monomial")))?;
        let ci = c.inv()?;
        if j == 0 {
            return Ok(Self::monomial(&ci, 0, self.level));
        }
        // θ̃^{-j} = θ̃^{n-j} / (-θ)
        let n = self.comps.len();
        let r = ci.div(&self.theta_base().neg())?;
        Ok(Self::monomial(&r, n - j, self.level))
    }

    /// `x^{q^k}`: component `i` maps to `x_i^{q^k} · (-θ)^{i(q^k-1)/(q-1)}`.
    pub fn frobenius(&self, k: u32) -> Self {
        let mut cur = self.clone();
        for _ in 0..k {
            cur = cur.frobenius1();
        }
        cur
    }

    fn frobenius1(&self) -> Self {
        let minus_theta = self.theta_base().neg();
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.frobenius(1)
                    .mul(&minus_theta.pow(i as i64).expect("nonzero"))
            })
            .collect();
        TowerScalar {
            level: self.level,
            comps,
        }
    }

    /// The `y` with `y^q = self`, at level 1, or `None` if `self` is not a `q`-th power there.
    pub fn qth_root(&self) -> Option<Self> {
        let q = self.field().q() as usize;
        let x = self.to_level1();
        let minus_theta = x.theta_base().neg();
        let comps = x
            .comps
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let w = c.div(&minus_theta.pow(i as i64).ok()?).ok()?;
                w.deflate(q)
            })
            .collect::<Option<Vec<_>>>()?;
        Some(TowerScalar {
            level: Level::One,
            comps,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": match self.level { Level::Zero => 0, Level::One => 1 },
            "components": self.comps.iter().map(RationalFunction::to_json).collect::<Vec<_>>(),
            "text": self.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_tilde_relation() {
        for q in [2u64, 3, 4, 5] {
            let fq = Fq::with_order(q).unwrap();
            let tt = TowerScalar::theta_tilde(&fq, Level::Zero);
            let lhs = tt.pow(q - 1);
            assert_eq!(lhs, TowerScalar::theta(&fq, Level::Zero).neg(), "q={q}");
            assert_eq!(
                tt.frobenius(1),
                tt.mul(&TowerScalar::theta(&fq, Level::Zero).neg())
            );
            assert_eq!(tt.frobenius(1), tt.pow(q));
        }
    }

    #[test]
    fn qth_roots() {
        let fq = Fq::new(3, 1).unwrap();
        let theta = TowerScalar::theta(&fq, Level::Zero);
        assert_eq!(theta.qth_root().unwrap(), TowerScalar::u(&fq));
        assert!(TowerScalar::u(&fq).qth_root().is_none());
        let tt = TowerScalar::theta_tilde(&fq, Level::Zero);
        let x = tt.mul(&theta.neg());
        let y = x.qth_root().unwrap();
        assert_eq!(y.pow(3).to_level0().unwrap(), x);
        assert_eq!(y, tt.to_level1());
    }

    #[test]
    fn monomial_inverse() {
        let fq = Fq::new(5, 1).unwrap();
        let tt = TowerScalar::theta_tilde(&fq, Level::Zero);
        let x = tt.pow(3).scale(&RationalFunction::x(&fq, Var::Theta));
        assert_eq!(x.mul(&x.inv().unwrap()), TowerScalar::one(&fq, Level::Zero));
        let y = x.add(&TowerScalar::one(&fq, Level::Zero));
        assert!(y.inv().is_err());
    }
}
