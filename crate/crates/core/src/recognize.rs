//! Rational recognition (Padé) and `A`-linear relations among series.
//!
//! Both reduce to nullspaces of linear systems over `F_q` in the unknown
//! coefficients; results are certificates at the working precision only.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fq::{Fe, Fq};
use crate::linalg;
use crate::poly::{Poly, Var};
use crate::rational::RationalFunction;
use crate::series::{PrecSeries, Valuation, EXACT};

/// Finds `N/Q` with `deg N, deg Q <= D` (after normalizing `x` to valuation 0)
/// agreeing with `x` to valuation `>= prec - guard`. The denominator found is
/// of minimal degree.
pub fn pade_recognize(x: &PrecSeries, d: usize, guard: i64) -> Result<Option<RationalFunction>> {
    let fq = x.field().clone();
    if x.is_exact() {
        return Ok(Some(exact_to_rational(x)));
    }
    let need = 2 * (d as i64 + 1) + guard;
    let v = match x.valuation() {
        Valuation::Exact(v) => v,
        Valuation::AtLeast(_) => {
            return Err(Error::Precision(format!(
                "series is zero at precision {}; nothing to recognize",
                x.prec()
            )));
        }
    };
    if x.prec() - v < need {
        return Err(Error::Precision(format!(
            "recognition window {} is below the required {need} for degree bound {d} and guard {guard}",
            x.prec() - v
        )));
    }
    let y = x.shift(v);
    let py = y.prec();
    for dq in 0..=d {
        // coefficient of θ^{-e}, 1 <= e < py - dq, in Q·y must vanish
        let rows: Vec<Vec<Fe>> = (1..py - dq as i64)
            .map(|e| {
                (0..=dq)
                    .map(|j| y.coeff(e + j as i64).expect("within precision"))
                    .collect()
            })
            .collect();
        let ns = linalg::nullspace(&fq, rows, dq + 1);
        let Some(qv) = ns.into_iter().next() else {
            continue;
        };
        let qpoly = Poly::from_coeffs(&fq, Var::Theta, qv);
        if qpoly.is_zero() {
            continue;
        }
        let num_c: Vec<Fe> = (0..=dq as i64)
            .map(|k| {
                (0..=dq as i64).fold(Fe::ZERO, |acc, j| {
                    let c = y.coeff(j - k).unwrap_or(Fe::ZERO);
                    fq.add(acc, fq.mul(qpoly.coeff(j as usize), c))
                })
            })
            .collect();
        let npoly = Poly::from_coeffs(&fq, Var::Theta, num_c);
        let Ok(r) = RationalFunction::new(npoly, qpoly) else {
            continue;
        };
        let r = r.mul(&RationalFunction::x_pow(&fq, Var::Theta, -v));
        let resid = x.sub(&PrecSeries::from_rational(&r, x.prec()));
        if resid.valuation().certainly_ge(x.prec() - guard) {
            return Ok(Some(r));
        }
        return Ok(None);
    }
    Ok(None)
}

fn exact_to_rational(x: &PrecSeries) -> RationalFunction {
    let fq = x.field();
    if x.is_zero() {
        return RationalFunction::zero(fq, Var::Theta);
    }
    // exact series are Laurent polynomials: shift to a polynomial and divide back
    let v_end = x.v0() + x.raw_coeffs().len() as i64 - 1;
    let shift = v_end.max(0);
    let p = x.shift(shift).polynomial_part().expect("exact");
    RationalFunction::new(p, Poly::monomial(fq, Var::Theta, Fe::ONE, shift as usize))
        .expect("nonzero")
}

/// A relation `Σ a_i v_i ≈ 0` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub coeffs: Vec<Poly>,
    pub residual: Valuation,
    pub degree_bound: usize,
}

impl Relation {
    pub fn to_json(&self) -> Value {
        json!({
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "residual_valuation": self.residual.to_json(),
            "degree_bound": self.degree_bound,
        })
    }
}

fn lower_start(s: &PrecSeries) -> i64 {
    if s.is_zero() {
        s.prec()
    } else {
        s.v0()
    }
}

/// Searches for `a_1..a_m ∈ A`, not all zero, `deg a_i <= D`, with
/// `val(Σ a_i v_i) >= P - guard`, where `P` is the smallest input precision.
pub fn linear_relation_find(v: &[PrecSeries], d: usize, guard: i64) -> Result<Option<Relation>> {
    let fq: Fq = v
        .first()
        .ok_or_else(|| Error::Invalid("empty family".into()))?
        .field()
        .clone();
    let m = v.len();
    let pmin = v.iter().map(PrecSeries::prec).min().unwrap();
    if pmin >= EXACT {
        return Err(Error::Invalid(
            "relation search needs at least one inexact series".into(),
        ));
    }
    let di = d as i64;
    let hi = pmin - di;
    let lo = v.iter().map(lower_start).min().unwrap().min(hi) - di;
    let unknowns = m * (d + 1);
    if hi - lo < unknowns as i64 + guard {
        return Err(Error::Precision(format!(
            "window of {} coefficients is below the required {} for {m} series, degree bound {d}, guard {guard}",
            hi - lo,
            unknowns as i64 + guard
        )));
    }
    // column (i, j) holds θ^j v_i; row e holds the coefficient of θ^{-e}
    let rows: Vec<Vec<Fe>> = (lo..hi)
        .map(|e| {
            let mut row = Vec::with_capacity(unknowns);
            for s in v {
                for j in 0..=di {
                    row.push(s.coeff(e + j).unwrap_or(Fe::ZERO));
                }
            }
            row
        })
        .collect();
    let ns = linalg::nullspace(&fq, rows, unknowns);
    let Some(sol) = ns.into_iter().next() else {
        return Ok(None);
    };
    let coeffs: Vec<Poly> = sol
        .chunks(d + 1)
        .map(|c| Poly::from_coeffs(&fq, Var::Theta, c.to_vec()))
        .collect();
    let combo = v
        .iter()
        .zip(&coeffs)
        .fold(PrecSeries::exact_zero(&fq), |acc, (s, a)| {
            acc.add(&s.mul(&PrecSeries::from_poly(a)))
        });
    let residual = combo.valuation();
    if !residual.certainly_ge(pmin - guard) {
        return Ok(None);
    }
    Ok(Some(Relation {
        coeffs,
        residual,
        degree_bound: d,
    }))
}

/// Greedy smallest-index-first maximal independent subset.
pub fn numeric_rank(v: &[PrecSeries], d: usize, guard: i64) -> Result<(usize, Vec<usize>)> {
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..v.len() {
        let mut fam: Vec<PrecSeries> = kept.iter().map(|&k| v[k].clone()).collect();
        fam.push(v[i].clone());
        if linear_relation_find(&fam, d, guard)?.is_none() {
            kept.push(i);
        }
    }
    Ok((kept.len(), kept))
}

/// Tries each degree bound in turn, skipping bounds the precision cannot support.
#[derive(Clone, Debug)]
pub struct RelationSearch {
    pub relation: Option<Relation>,
    pub degree_bounds_tried: Vec<usize>,
}

pub fn find_relation_escalating(
    v: &[PrecSeries],
    bounds: &[usize],
    guard: i64,
) -> Result<RelationSearch> {
    let mut tried = Vec::new();
    let mut last_err = None;
    for &d in bounds {
        match linear_relation_find(v, d, guard) {
            Ok(Some(r)) => {
                tried.push(d);
                return Ok(RelationSearch {
                    relation: Some(r),
                    degree_bounds_tried: tried,
                });
            }
            Ok(None) => tried.push(d),
            Err(e @ Error::Precision(_)) => {
                last_err = Some(e);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if tried.is_empty() {
        return Err(last_err.unwrap_or_else(|| Error::Invalid("no degree bounds given".into())));
    }
    Ok(RelationSearch {
        relation: None,
        degree_bounds_tried: tried,
    })
}

/// Padé recognition over escalating degree bounds, stopping at the first bound
/// the precision cannot support.
pub fn pade_escalating(
    x: &PrecSeries,
    bounds: &[usize],
    guard: i64,
) -> Result<Option<(RationalFunction, usize)>> {
    let mut any = false;
    for &d in bounds {
        match pade_recognize(x, d, guard) {
            Ok(Some(r)) => return Ok(Some((r, d))),
            Ok(None) => any = true,
            Err(Error::Precision(m)) => {
                if any {
                    break;
                }
                return Err(Error::Precision(m));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Degree bounds tried by every escalating search.
pub const DEGREE_BOUNDS: [usize; 4] = [4, 8, 16, 32];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Recognized,
    UnrecognizedAtPrecision,
}

/// Rational recognition repeated at two precisions. The outcome is
/// `Recognized` only if both runs return the same rational.
#[derive(Clone, Debug)]
pub struct Recognition {
    pub outcome: Outcome,
    pub rational: Option<RationalFunction>,
    pub degree_bound: Option<usize>,
    pub precisions: Vec<i64>,
    pub residuals: Vec<Valuation>,
    pub note: Option<String>,
}

impl Recognition {
    pub fn to_json(&self) -> Value {
        json!({
            "outcome": self.outcome,
            "rational": self.rational.as_ref().map(|r| r.to_string()),
            "rational_exact": self.rational.as_ref().map(RationalFunction::to_json),
            "degree_bound": self.degree_bound,
            "precisions": self.precisions,
            "residual_valuations": self.residuals.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
            "note": self.note,
        })
    }

    pub fn is_recognized(&self) -> bool {
        self.outcome == Outcome::Recognized
    }
}

fn residual(x: &PrecSeries, r: &RationalFunction) -> Valuation {
    x.sub(&PrecSeries::from_rational(r, x.prec())).valuation()
}

/// Recognizes `compute(p)` for each precision in `precs` and requires identical answers.
pub fn recognize_stable(
    precs: &[i64],
    guard: i64,
    mut compute: impl FnMut(i64) -> Result<PrecSeries>,
) -> Result<Recognition> {
    let mut found: Option<(RationalFunction, usize)> = None;
    let mut residuals = Vec::new();
    let mut note = None;
    for &p in precs {
        let x = compute(p)?;
        match pade_escalating(&x, &DEGREE_BOUNDS, guard)? {
            Some((r, d)) => {
                residuals.push(residual(&x, &r));
                match &found {
                    Some((prev, _)) if prev != &r => {
                        note = Some(format!(
                            "precision {p} recognized {r}, earlier precision gave {prev}"
                        ));
                        found = None;
                        break;
                    }
                    Some(_) => {}
                    None => found = Some((r, d)),
                }
            }
            None => {
                note = Some(format!(
                    "no rational with degree <= {} at precision {p}",
                    DEGREE_BOUNDS[DEGREE_BOUNDS.len() - 1]
                ));
                found = None;
                break;
            }
        }
    }
    Ok(match found {
        Some((r, d)) => Recognition {
            outcome: Outcome::Recognized,
            rational: Some(r),
            degree_bound: Some(d),
            precisions: precs.to_vec(),
            residuals,
            note,
        },
        None => Recognition {
            outcome: Outcome::UnrecognizedAtPrecision,
            rational: None,
            degree_bound: None,
            precisions: precs.to_vec(),
            residuals,
            note,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Fq {
        Fq::new(3, 1).unwrap()
    }

    #[test]
    fn planted_rationals() {
        let f = f3();
        let r = RationalFunction::new(
            Poly::one(&f, Var::Theta),
            Poly::from_ints(&f, Var::Theta, &[1, 1]),
        )
        .unwrap();
        let s = PrecSeries::from_rational(&r, 40);
        assert_eq!(pade_recognize(&s, 3, 10).unwrap(), Some(r));
        let r2 = RationalFunction::new(
            Poly::from_ints(&f, Var::Theta, &[1, 0, 1]),
            Poly::from_ints(&f, Var::Theta, &[1, 1, 0, 1]),
        )
        .unwrap();
        let s2 = PrecSeries::from_rational(&r2, 60);
        assert_eq!(pade_recognize(&s2, 5, 10).unwrap(), Some(r2));
        assert!(matches!(
            pade_recognize(&s2.truncate(10), 5, 10),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn relation_examples() {
        let f = f3();
        let x = PrecSeries::from_terms(
            &f,
            0,
            vec![Fe(1), Fe(2), Fe(0), Fe(1), Fe(1), Fe(2), Fe(1)],
            40,
        );
        let tx = x.mul(&PrecSeries::theta_pow(&f, 1));
        let rel = linear_relation_find(&[x.clone(), tx.clone()], 1, 5)
            .unwrap()
            .unwrap();
        // normalized so the last free column carries 1
        let check = x
            .mul(&PrecSeries::from_poly(&rel.coeffs[0]))
            .add(&tx.mul(&PrecSeries::from_poly(&rel.coeffs[1])));
        assert!(check.valuation().certainly_ge(30));
        let (rank, idx) = numeric_rank(&[x.clone(), tx], 1, 5).unwrap();
        assert_eq!((rank, idx), (1, vec![0]));
    }
}
