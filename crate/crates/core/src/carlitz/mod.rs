//! The Carlitz module: `D_i`, `L_i`, the polynomials `e_d`, the exponential,
//! logarithm, polylogarithms, the period `π̃`, division polynomials and the
//! degree-`d` power-sum engines.

mod analytic;
mod division;
mod powersum;

pub use analytic::{carlitz_exp, carlitz_log, e_of, pi_tilde, polylog};
pub use division::{cyclotomic_star, division_poly, BiPoly, LinPoly};
pub use powersum::{
    gate_check, powersum, powersum_accelerated, powersum_enumerated, Engine, GateReport, PowerSum,
};

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::ext::ExtScalar;
use crate::fq::{Fe, Fq};
use crate::poly::{Poly, Var};
use crate::series::PrecSeries;

/// `q^i` if it fits in an `i64`.
pub(crate) fn qpow(q: u32, i: usize) -> Option<i64> {
    (q as i64).checked_pow(u32::try_from(i).ok()?)
}

/// Memoized Carlitz data for one field. Entries are computed once and never
/// change; the cache may be shared across threads.
pub struct CarlitzCache {
    fq: Fq,
    d: Mutex<Vec<Poly>>,
    l: Mutex<Vec<Poly>>,
    e_coeffs: Mutex<Vec<Arc<Vec<Poly>>>>,
    beta: Mutex<BTreeMap<i64, Vec<Arc<Vec<PrecSeries>>>>>,
    pi: Mutex<BTreeMap<i64, ExtScalar>>,
    pub(crate) gate: OnceLock<GateReport>,
    pub(crate) gamma_gate: crate::gamma::GateCell,
}

impl std::fmt::Debug for CarlitzCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CarlitzCache({:?})", self.fq)
    }
}

impl CarlitzCache {
    pub fn new(fq: &Fq) -> Self {
        let one = Poly::one(fq, Var::Theta);
        CarlitzCache {
            fq: fq.clone(),
            d: Mutex::new(vec![one.clone()]),
            l: Mutex::new(vec![one.clone()]),
            e_coeffs: Mutex::new(vec![Arc::new(vec![one])]),
            beta: Mutex::new(BTreeMap::new()),
            pi: Mutex::new(BTreeMap::new()),
            gate: OnceLock::new(),
            gamma_gate: OnceLock::new(),
        }
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }

    fn theta_qi_minus(&self, i: usize, sign_theta_first: bool) -> Poly {
        // θ^{q^i} - θ  or  θ - θ^{q^i}
        let q = self.fq.q() as usize;
        let big = Poly::monomial(&self.fq, Var::Theta, Fe::ONE, q.pow(i as u32));
        let th = Poly::x(&self.fq, Var::Theta);
        if sign_theta_first {
            th.sub(&big)
        } else {
            big.sub(&th)
        }
    }

    /// `D_i = ∏_{j<i} (θ^{q^i} - θ^{q^j})`.
    pub fn d(&self, i: usize) -> Poly {
        let mut d = self.d.lock().unwrap();
        while d.len() <= i {
            let k = d.len();
            let next = self.theta_qi_minus(k, false).mul(&d[k - 1].frobenius(1));
            d.push(next);
        }
        d[i].clone()
    }

    /// `L_i = ∏_{1<=j<=i} (θ - θ^{q^j})`.
    pub fn l(&self, i: usize) -> Poly {
        let mut l = self.l.lock().unwrap();
        while l.len() <= i {
            let k = l.len();
            let next = l[k - 1].mul(&self.theta_qi_minus(k, true));
            l.push(next);
        }
        l[i].clone()
    }

    pub fn deg_d(&self, i: usize) -> Option<i64> {
        (i as i64).checked_mul(qpow(self.fq.q(), i)?)
    }

    pub fn deg_l(&self, i: usize) -> Option<i64> {
        let q = self.fq.q() as i64;
        let qi1 = qpow(self.fq.q(), i + 1)?;
        Some((qi1 - q) / (q - 1))
    }

    /// Exact coefficients of `e_d(z) = ∏_{deg b < d}(z - b) = Σ_i c_i z^{q^i}`.
    pub fn e_coeffs(&self, d: usize) -> Arc<Vec<Poly>> {
        let mut e = self.e_coeffs.lock().unwrap();
        while e.len() <= d {
            let k = e.len();
            let prev = e[k - 1].clone();
            let dq1 = self.d(k - 1).pow(self.fq.q() as u64 - 1);
            let zero = Poly::zero(&self.fq, Var::Theta);
            let next: Vec<Poly> = (0..=k)
                .map(|i| {
                    let a = if i > 0 {
                        prev[i - 1].frobenius(1)
                    } else {
                        zero.clone()
                    };
                    let b = prev
                        .get(i)
                        .map(|c| dq1.mul(c))
                        .unwrap_or_else(|| zero.clone());
                    a.sub(&b)
                })
                .collect();
            e.push(Arc::new(next));
        }
        e[d].clone()
    }

    /// `e_d(a)` for a polynomial `a`, exactly.
    pub fn e_eval(&self, d: usize, a: &Poly) -> Poly {
        let c = self.e_coeffs(d);
        c.iter()
            .enumerate()
            .fold(Poly::zero(&self.fq, Var::Theta), |acc, (i, ci)| {
                acc.add(&ci.mul(&a.frobenius(i as u32)))
            })
    }

    /// Normalized coefficients `β^{(d)}_i = c_i / D_d` at absolute precision `prec`.
    /// Entries that vanish at that precision are returned as zero series.
    pub fn beta(&self, d: usize, prec: i64) -> Arc<Vec<PrecSeries>> {
        let mut map = self.beta.lock().unwrap();
        let table = map
            .entry(prec)
            .or_insert_with(|| vec![Arc::new(vec![PrecSeries::one(&self.fq).truncate(prec)])]);
        while table.len() <= d {
            let k = table.len();
            let prev = table[k - 1].clone();
            let inv = inv_theta_qk_minus_theta(&self.fq, k, prec);
            let zero = PrecSeries::zero(&self.fq, prec);
            let next: Vec<PrecSeries> = (0..=k)
                .map(|i| {
                    let a = if i > 0 {
                        prev[i - 1].frobenius(1, Some(prec))
                    } else {
                        zero.clone()
                    };
                    let b = prev.get(i).cloned().unwrap_or_else(|| zero.clone());
                    a.sub(&b).mul(&inv).truncate(prec)
                })
                .collect();
            table.push(Arc::new(next));
        }
        table[d].clone()
    }

    pub(crate) fn pi_cached(&self, prec: i64) -> Option<ExtScalar> {
        self.pi.lock().unwrap().get(&prec).cloned()
    }

    pub(crate) fn pi_store(&self, prec: i64, v: ExtScalar) {
        self.pi.lock().unwrap().insert(prec, v);
    }
}

/// `1/(θ^{q^k} - θ) = Σ_{m>=0} θ^{-q^k - m(q^k - 1)}` to precision `prec`.
fn inv_theta_qk_minus_theta(fq: &Fq, k: usize, prec: i64) -> PrecSeries {
    let Some(qk) = qpow(fq.q(), k).filter(|&qk| qk < prec) else {
        return PrecSeries::zero(fq, prec);
    };
    let len = (prec - qk) as usize;
    let mut c = vec![Fe::ZERO; len];
    let step = (qk - 1) as usize;
    let mut pos = 0;
    while pos < len {
        c[pos] = Fe::ONE;
        pos += step.max(1);
        if step == 0 {
            break;
        }
    }
    PrecSeries::from_terms(fq, qk, c, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::monic_iter;

    #[test]
    fn degrees_and_small_values() {
        for q in [2u64, 3, 4] {
            let fq = Fq::with_order(q).unwrap();
            let c = CarlitzCache::new(&fq);
            for i in 0..4 {
                assert_eq!(c.d(i).deg_i64(), c.deg_d(i).unwrap());
                assert_eq!(c.l(i).deg_i64(), c.deg_l(i).unwrap());
                assert!(c.d(i).is_monic());
            }
        }
        let f2 = Fq::new(2, 1).unwrap();
        let c = CarlitzCache::new(&f2);
        assert_eq!(c.l(1), Poly::from_ints(&f2, Var::Theta, &[0, 1, 1]));
    }

    #[test]
    fn e_d_vanishes_on_small_polynomials() {
        for q in [2u64, 3] {
            let fq = Fq::with_order(q).unwrap();
            let c = CarlitzCache::new(&fq);
            for d in 0..=3usize {
                // every b with deg b < d is a root; e_d(θ^d) = D_d
                for dd in 0..d {
                    for m in monic_iter(&fq, dd, 1 << 20).unwrap() {
                        for s in fq.nonzero_elements() {
                            assert!(c.e_eval(d, &m.scale(s)).is_zero());
                        }
                    }
                }
                let td = Poly::monomial(&fq, Var::Theta, Fe::ONE, d);
                assert_eq!(c.e_eval(d, &td), c.d(d));
            }
        }
    }

    #[test]
    fn beta_matches_exact_quotient() {
        let fq = Fq::new(3, 1).unwrap();
        let c = CarlitzCache::new(&fq);
        let prec = 80;
        for d in 0..=3 {
            let b = c.beta(d, prec);
            let e = c.e_coeffs(d);
            let dinv = PrecSeries::inv_poly(&c.d(d), prec + 200).unwrap();
            for i in 0..=d {
                let exact = PrecSeries::from_poly(&e[i]).mul(&dinv).truncate(prec);
                assert_eq!(b[i], exact, "d={d} i={i}");
            }
        }
    }
}
