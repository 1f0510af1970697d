//! Carlitz division polynomials `C_a(t, z)` and the cyclotomic factors `C_f^⋆`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ext::ExtScalar;
use crate::factor::monic_divisors;
use crate::fq::Fq;
use crate::poly::{Poly, Var};
use crate::series::PrecSeries;

/// An `F_q`-linear polynomial `Σ_i α_i(t) z^{q^i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinPoly {
    fq: Fq,
    coeffs: Vec<Poly>,
}

/// A polynomial in `z` with coefficients in `F_q[t]`, stored densely by `z`-degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    fq: Fq,
    coeffs: Vec<Poly>,
}

fn tpoly_zero(fq: &Fq) -> Poly {
    Poly::zero(fq, Var::T)
}

impl LinPoly {
    pub fn zero(fq: &Fq) -> Self {
        LinPoly {
            fq: fq.clone(),
            coeffs: Vec::new(),
        }
    }

    fn from_coeffs(fq: &Fq, mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        LinPoly {
            fq: fq.clone(),
            coeffs,
        }
    }

    /// Coefficient of `z^{q^i}`.
    pub fn coeff(&self, i: usize) -> Poly {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| tpoly_zero(&self.fq))
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    /// `z`-degree `q^{len-1}`, or `None` for zero.
    pub fn z_degree(&self) -> Option<u64> {
        let l = self.coeffs.len();
        (l > 0).then(|| (self.fq.q() as u64).pow(l as u32 - 1))
    }

    /// `self(t, other(t, z))`.
    pub fn compose(&self, other: &LinPoly) -> LinPoly {
        let mut out =
            vec![tpoly_zero(&self.fq); (self.coeffs.len() + other.coeffs.len()).saturating_sub(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(&b.frobenius(i as u32)));
            }
        }
        LinPoly::from_coeffs(&self.fq, out)
    }

    pub fn to_bipoly(&self) -> BiPoly {
        let q = self.fq.q() as usize;
        let Some(deg) = self.z_degree() else {
            return BiPoly::zero(&self.fq);
        };
        let mut c = vec![tpoly_zero(&self.fq); deg as usize + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[q.pow(i as u32)] = a.clone();
        }
        BiPoly::from_coeffs(&self.fq, c)
    }

    /// Evaluation at `t = θ` and a given `z`.
    pub fn eval_theta(&self, z: &ExtScalar) -> ExtScalar {
        let mut acc = ExtScalar::zero(&self.fq, crate::series::EXACT);
        let mut zp = z.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                zp = zp.frobenius(1, None);
            }
            let a_theta = PrecSeries::from_poly(&a.clone().with_var(Var::Theta));
            acc = acc.add(&zp.scale_series(&a_theta));
        }
        acc
    }
}

impl BiPoly {
    pub fn zero(fq: &Fq) -> Self {
        BiPoly {
            fq: fq.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn z(fq: &Fq) -> Self {
        BiPoly::from_coeffs(fq, vec![tpoly_zero(fq), Poly::one(fq, Var::T)])
    }

    pub fn from_coeffs(fq: &Fq, mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        BiPoly {
            fq: fq.clone(),
            coeffs,
        }
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn z_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mul(&self, o: &BiPoly) -> BiPoly {
        if self.is_zero() || o.is_zero() {
            return BiPoly::zero(&self.fq);
        }
        let mut out = vec![tpoly_zero(&self.fq); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        BiPoly::from_coeffs(&self.fq, out)
    }

    pub fn sub(&self, o: &BiPoly) -> BiPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = tpoly_zero(&self.fq);
        let c = (0..n)
            .map(|i| {
                self.coeffs
                    .get(i)
                    .unwrap_or(&z)
                    .sub(o.coeffs.get(i).unwrap_or(&z))
            })
            .collect();
        BiPoly::from_coeffs(&self.fq, c)
    }

    /// Division by a divisor that is monic in `z`; returns `(quotient, remainder)`.
    pub fn divrem_monic(&self, d: &BiPoly) -> Result<(BiPoly, BiPoly)> {
        let dd = d
            .z_degree()
            .ok_or_else(|| Error::DivisionByZero("division by zero bivariate polynomial".into()))?;
        if !d.coeffs[dd].is_one() {
            return Err(Error::Invalid("divisor must be monic in z".into()));
        }
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((BiPoly::zero(&self.fq), self.clone()));
        }
        let mut quot = vec![tpoly_zero(&self.fq); r.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = r[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] = r[k + i].sub(&c.mul(dc));
            }
            quot[k] = c;
        }
        r.truncate(dd);
        Ok((
            BiPoly::from_coeffs(&self.fq, quot),
            BiPoly::from_coeffs(&self.fq, r),
        ))
    }

    /// Evaluation at `t = θ` and a given `z` (Horner).
    pub fn eval_theta(&self, z: &ExtScalar) -> ExtScalar {
        let mut acc = ExtScalar::zero(&self.fq, crate::series::EXACT);
        for c in self.coeffs.iter().rev() {
            let ct = ExtScalar::from_series(PrecSeries::from_poly(&c.clone().with_var(Var::Theta)));
            acc = acc.mul(z).add(&ct);
        }
        acc
    }
}

/// `C_a(t, z)` by the recursion `C_{θb+ε}(t, z) = C_b(t, tz + z^q) + εz`.
pub fn division_poly(a: &Poly) -> LinPoly {
    let fq = a.field().clone();
    let t = Poly::x(&fq, Var::T);
    let mut cur = LinPoly::zero(&fq);
    for &eps in a.coeffs().iter().rev() {
        // substitute z -> tz + z^q, then add εz
        let n = cur.coeffs.len() + 1;
        let mut next = vec![tpoly_zero(&fq); n];
        for (i, b) in cur.coeffs.iter().enumerate() {
            next[i] = next[i].add(&b.mul(&t.frobenius(i as u32)));
            next[i + 1] = next[i + 1].add(b);
        }
        next[0] = next[0].add(&Poly::constant(&fq, Var::T, eps));
        cur = LinPoly::from_coeffs(&fq, next);
    }
    cur
}

/// `C_f^⋆`, with the convention `C_1^⋆ = z`, obtained by dividing `C_f` by the
/// factors attached to all proper monic divisors of `f`.
pub fn cyclotomic_star(f: &Poly, seed: u64) -> Result<BiPoly> {
    if !f.is_monic() || f.is_constant() {
        return Err(Error::Invalid(format!(
            "cyclotomic factor needs monic f of positive degree, got {f}"
        )));
    }
    let mut memo: BTreeMap<Poly, BiPoly> = BTreeMap::new();
    star_rec(f, seed, &mut memo)
}

fn star_rec(f: &Poly, seed: u64, memo: &mut BTreeMap<Poly, BiPoly>) -> Result<BiPoly> {
    let fq = f.field().clone();
    if f.is_one() {
        return Ok(BiPoly::z(&fq));
    }
    if let Some(v) = memo.get(f) {
        return Ok(v.clone());
    }
    let mut denom = BiPoly::from_coeffs(&fq, vec![Poly::one(&fq, Var::T)]);
    for g in monic_divisors(f, seed)? {
        if &g != f {
            denom = denom.mul(&star_rec(&g, seed, memo)?);
        }
    }
    let cf = division_poly(f).to_bipoly();
    let (quot, rem) = cf.divrem_monic(&denom)?;
    if !rem.is_zero() {
        return Err(Error::Invalid(format!(
            "C_f^⋆ division for f = {f} left a nonzero remainder"
        )));
    }
    memo.insert(f.clone(), quot.clone());
    Ok(quot)
}

impl Fq {
    /// `t` as a polynomial in this field.
    pub fn t(&self) -> Poly {
        Poly::x(self, Var::T)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::euler_phi_a;

    #[test]
    fn first_division_polynomials() {
        for q in [2u64, 3] {
            let fq = Fq::with_order(q).unwrap();
            let one = Poly::one(&fq, Var::Theta);
            assert_eq!(division_poly(&one).coeffs(), &[Poly::one(&fq, Var::T)]);
            let th = Poly::x(&fq, Var::Theta);
            assert_eq!(
                division_poly(&th).coeffs(),
                &[fq.t(), Poly::one(&fq, Var::T)]
            );
            let star = cyclotomic_star(&th, 0).unwrap();
            let mut expect = vec![tpoly_zero(&fq); q as usize];
            expect[0] = fq.t();
            expect[q as usize - 1] = Poly::one(&fq, Var::T);
            assert_eq!(star, BiPoly::from_coeffs(&fq, expect));
        }
    }

    #[test]
    fn star_degree_is_phi() {
        let fq = Fq::new(3, 1).unwrap();
        let f = Poly::from_ints(&fq, Var::Theta, &[1, 0, 1]);
        let s = cyclotomic_star(&f, 0).unwrap();
        assert_eq!(s.z_degree().unwrap() as u64, euler_phi_a(&f, 0).unwrap());
    }
}
