//! `K_∞ = k_∞(θ̃)`: vectors of `q-1` series over the basis `θ̃^0, …, θ̃^{q-2}`.

use std::fmt;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::fq::{Fe, Fq};
use crate::rational::RationalFunction;
use crate::series::{PrecSeries, Valuation, EXACT};
use crate::tower::TowerScalar;

#[derive(Clone, PartialEq, Eq)]
pub struct ExtScalar {
    comps: Vec<PrecSeries>,
}

impl fmt::Debug for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("[{c}]·θ̃^{i}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0 + O(θ^{})", -self.min_prec())
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn basis_len(fq: &Fq) -> usize {
    fq.q() as usize - 1
}

/// `(-θ)^m` as an exact series.
fn minus_theta_pow(fq: &Fq, m: i64) -> PrecSeries {
    let s = PrecSeries::theta_pow(fq, m);
    if m.rem_euclid(2) == 1 {
        s.neg()
    } else {
        s
    }
}

impl ExtScalar {
    pub fn from_components(comps: Vec<PrecSeries>) -> Result<Self> {
        let fq = comps
            .first()
            .map(|c| c.field().clone())
            .ok_or_else(|| Error::Invalid("empty component list".into()))?;
        if comps.len() != basis_len(&fq) {
            return Err(Error::Invalid(format!(
                "expected {} components, got {}",
                basis_len(&fq),
                comps.len()
            )));
        }
        Ok(ExtScalar { comps })
    }

    pub fn zero(fq: &Fq, prec: i64) -> Self {
        ExtScalar {
            comps: vec![PrecSeries::zero(fq, prec); basis_len(fq)],
        }
    }

    /// `s · θ̃^j` with the other components exactly zero.
    pub fn monomial(s: PrecSeries, j: usize) -> Self {
        let fq = s.field().clone();
        let mut x = Self::zero(&fq, EXACT);
        x.comps[j] = s;
        x
    }

    pub fn from_series(s: PrecSeries) -> Self {
        Self::monomial(s, 0)
    }

    pub fn one(fq: &Fq) -> Self {
        Self::from_series(PrecSeries::one(fq))
    }

    pub fn from_rational(r: &RationalFunction, prec: i64) -> Self {
        Self::from_series(PrecSeries::from_rational(r, prec))
    }

    /// Expands a tower scalar; level-1 elements must descend to level 0.
    pub fn from_tower(t: &TowerScalar, prec: i64) -> Result<Self> {
        let t0 = t.to_level0().ok_or_else(|| {
            Error::Invalid(format!(
                "{t} involves θ^(1/q) and has no expansion in k_∞(θ̃)"
            ))
        })?;
        Ok(ExtScalar {
            comps: t0
                .components()
                .iter()
                .map(|c| PrecSeries::from_rational(c, prec))
                .collect(),
        })
    }

    /// `θ̃^k` for any integer `k`, exact.
    pub fn theta_tilde_pow(fq: &Fq, k: i64) -> Self {
        let n = basis_len(fq) as i64;
        let m = k.div_euclid(n);
        let j = k.rem_euclid(n) as usize;
        Self::monomial(minus_theta_pow(fq, m), j)
    }

    pub fn theta_tilde(fq: &Fq) -> Self {
        Self::theta_tilde_pow(fq, 1)
    }

    pub fn field(&self) -> &Fq {
        self.comps[0].field()
    }
    pub fn components(&self) -> &[PrecSeries] {
        &self.comps
    }
    pub fn component(&self, i: usize) -> &PrecSeries {
        &self.comps[i]
    }

    /// Smallest component precision.
    pub fn min_prec(&self) -> i64 {
        self.comps
            .iter()
            .map(PrecSeries::prec)
            .min()
            .unwrap_or(EXACT)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(PrecSeries::is_zero)
    }

    /// Lower bound for the valuations of all components (in units of `val θ^{-1}`).
    pub fn component_valuation(&self) -> Valuation {
        let lower = self
            .comps
            .iter()
            .map(|c| c.valuation().lower())
            .min()
            .unwrap_or(EXACT);
        if self
            .comps
            .iter()
            .any(|c| c.valuation() == Valuation::Exact(lower))
        {
            Valuation::Exact(lower)
        } else {
            Valuation::AtLeast(lower)
        }
    }

    /// Valuation in units of `1/(q-1)`, using `val θ̃ = -1/(q-1)`.
    pub fn scaled_valuation(&self) -> Valuation {
        let n = self.comps.len() as i64;
        let mut best: Option<Valuation> = None;
        for (j, c) in self.comps.iter().enumerate() {
            let v = match c.valuation() {
                Valuation::Exact(v) => Valuation::Exact(n * v - j as i64),
                Valuation::AtLeast(v) if v >= EXACT => continue,
                Valuation::AtLeast(v) => Valuation::AtLeast(n * v - j as i64),
            };
            best = Some(match best {
                None => v,
                Some(b) if v.lower() < b.lower() => v,
                Some(b) if v.lower() == b.lower() && v.is_exact() => v,
                Some(b) => b,
            });
        }
        best.unwrap_or(Valuation::AtLeast(EXACT))
    }

    /// The unique nonzero component, if only one is nonzero at precision.
    pub fn as_monomial(&self) -> Option<(usize, &PrecSeries)> {
        let mut nz = self.comps.iter().enumerate().filter(|(_, c)| !c.is_zero());
        let first = nz.next()?;
        nz.next().is_none().then_some(first)
    }

    fn map(&self, f: impl Fn(&PrecSeries) -> PrecSeries) -> Self {
        ExtScalar {
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        ExtScalar {
            comps: self
                .comps
                .iter()
                .zip(&o.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }
    pub fn sub(&self, o: &Self) -> Self {
        ExtScalar {
            comps: self
                .comps
                .iter()
                .zip(&o.comps)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }
    pub fn neg(&self) -> Self {
        self.map(PrecSeries::neg)
    }
    pub fn scale(&self, c: Fe) -> Self {
        self.map(|s| s.scale(c))
    }
    pub fn scale_series(&self, s: &PrecSeries) -> Self {
        self.map(|c| c.mul(s))
    }
    pub fn truncate(&self, prec: i64) -> Self {
        self.map(|c| c.truncate(prec))
    }
    /// Multiplication by `θ^k`.
    pub fn shift(&self, k: i64) -> Self {
        self.map(|c| c.shift(k))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.comps.len();
        let fq = self.field().clone();
        let mut out: Vec<Option<PrecSeries>> = vec![None; n];
        for (i, a) in self.comps.iter().enumerate() {
            for (j, b) in o.comps.iter().enumerate() {
                let mut p = a.mul(b);
                let mut k = i + j;
                if k >= n {
                    k -= n;
                    p = p.shift(1).neg();
                }
                out[k] = Some(match out[k].take() {
                    None => p,
                    Some(acc) => acc.add(&p),
                });
            }
        }
        ExtScalar {
            comps: out
                .into_iter()
                .map(|c| c.unwrap_or_else(|| PrecSeries::exact_zero(&fq)))
                .collect(),
        }
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = Self::one(self.field());
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

    /// Inverse of an element with a single nonzero component. The other
    /// components must vanish at their precision; their precision bounds the result.
    pub fn inv(&self) -> Result<Self> {
        let fq = self.field().clone();
        let (j, c) = self.as_monomial().ok_or_else(|| {
            Error::NotInvertible(format!("{self} is not a θ̃-monomial at its precision"))
        })?;
        let v = c.v0();
        // x = c θ̃^j (1 + ε) with val ε >= min over other comps of (prec_i - v) in scaled units
        let mut rel = c.prec() - v;
        for (i, other) in self.comps.iter().enumerate() {
            if i != j && !other.is_exact() {
                let gap = other.prec() - v - if i > j { 1 } else { 0 };
                rel = rel.min(gap);
            }
        }
        let ci = if rel >= EXACT / 2 {
            c.inv()?
        } else {
            c.truncate(v + rel).inv()?
        };
        Ok(Self::monomial(ci, 0).mul(&Self::theta_tilde_pow(&fq, -(j as i64))))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// `x^{q^k}`: component `i` becomes `c_i^{q^k} · (-θ)^{i (q^k - 1)/(q - 1)}`.
    /// The optional cap bounds the resulting component precisions.
    pub fn frobenius(&self, k: u32, cap: Option<i64>) -> Self {
        let fq = self.field().clone();
        let q = fq.q() as i64;
        let qk = q.checked_pow(k);
        let n = self.comps.len() as i64;
        ExtScalar {
            comps: self
                .comps
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let m = qk.map(|qk| i as i64 * ((qk - 1) / n.max(1)));
                    let twist_cap = cap.map(|cp| cp + m.unwrap_or(0));
                    let tw = c.frobenius(k, twist_cap);
                    match m {
                        Some(m) if i > 0 => tw.mul(&minus_theta_pow(&fq, m)),
                        _ => tw,
                    }
                })
                .collect(),
        }
    }

    /// Whether `self - o` has all components of valuation `>= threshold`.
    pub fn agrees_to(&self, o: &Self, threshold: i64) -> bool {
        self.sub(o).component_valuation().certainly_ge(threshold)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.comps.iter().map(PrecSeries::to_json).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_tilde_powers() {
        for q in [2u64, 3, 4, 5] {
            let fq = Fq::with_order(q).unwrap();
            let tt = ExtScalar::theta_tilde(&fq);
            let minus_theta = ExtScalar::from_series(PrecSeries::theta_pow(&fq, 1).neg());
            assert_eq!(tt.pow(q - 1), minus_theta, "q={q}");
            assert_eq!(tt.frobenius(1, None), tt.mul(&minus_theta));
            let inv = tt.inv().unwrap();
            assert_eq!(inv.mul(&tt), ExtScalar::one(&fq));
            assert_eq!(tt.scaled_valuation(), Valuation::Exact(-1));
        }
    }

    #[test]
    fn frobenius_matches_power() {
        let fq = Fq::new(3, 1).unwrap();
        let c0 = PrecSeries::from_terms(&fq, -1, vec![Fe(1), Fe(2), Fe(1)], 12);
        let c1 = PrecSeries::from_terms(&fq, 0, vec![Fe(2), Fe(0), Fe(1)], 12);
        let x = ExtScalar::from_components(vec![c0, c1]).unwrap();
        let a = x.frobenius(1, None);
        let b = x.pow(3);
        assert!(a.agrees_to(&b, a.min_prec().min(b.min_prec())));
    }
}
