use crate::error::{Error, Result};
use crate::ext::ExtScalar;
use crate::poly::Poly;
use crate::rational::RationalFunction;
use crate::series::{PrecSeries, Valuation, EXACT};

use super::{qpow, CarlitzCache};

const MAX_TERMS: usize = 64;

/// `Σ_i z^{q^i} / den(i)` truncated once three consecutive predicted term
/// valuations are increasing and at least `prec`. `den_deg(i)` must equal
/// `deg den(i)`; predictions are in units of `1/(q-1)`.
fn linearized_sum(
    z: &ExtScalar,
    prec: i64,
    den: impl Fn(usize) -> Poly,
    den_deg: impl Fn(usize) -> Option<i64>,
) -> Result<ExtScalar> {
    let fq = z.field().clone();
    let n = (fq.q() - 1) as i128;
    let target = n * prec as i128;
    let sv = match z.scaled_valuation() {
        Valuation::Exact(v) => v as i128,
        // z is zero at its precision; every later term is smaller still
        Valuation::AtLeast(_) => return Ok(z.truncate(prec)),
    };
    let mut sum: Option<ExtScalar> = None;
    let mut zpow = z.clone();
    let mut history: Vec<i128> = Vec::new();
    for i in 0..MAX_TERMS {
        let qi =
            qpow(fq.q(), i).ok_or_else(|| Error::Precision("term index overflow".into()))? as i128;
        let dd = den_deg(i).ok_or_else(|| Error::Precision("denominator degree overflow".into()))?
            as i128;
        let pred = qi * sv + n * dd;
        history.push(pred);
        let h = history.len();
        if h >= 3
            && history[h - 3..].iter().all(|&p| p >= target)
            && history[h - 3] < history[h - 2]
            && history[h - 2] < pred
        {
            let s = sum.unwrap_or_else(|| ExtScalar::zero(&fq, prec));
            return Ok(s.truncate(prec));
        }
        if pred < target {
            let vz = zpow.component_valuation().lower().min(prec);
            let inv = PrecSeries::inv_poly(&den(i), prec - vz + 1)?;
            let term = zpow.scale_series(&inv);
            sum = Some(match sum {
                None => term,
                Some(s) => s.add(&term),
            });
        }
        if i + 1 < MAX_TERMS {
            zpow = zpow.frobenius(1, Some(prec.max(1)));
        }
    }
    Err(Error::Precision(format!(
        "series did not reach valuation {prec} within {MAX_TERMS} terms"
    )))
}

/// `exp_C(z) = Σ z^{q^i}/D_i` to absolute precision `prec`.
pub fn carlitz_exp(cache: &CarlitzCache, z: &ExtScalar, prec: i64) -> Result<ExtScalar> {
    linearized_sum(z, prec, |i| cache.d(i), |i| cache.deg_d(i))
}

fn check_disk(z: &ExtScalar, n: u32, what: &str) -> Result<()> {
    let q = z.field().q() as i64;
    if let Valuation::Exact(sv) = z.scaled_valuation() {
        // val z > -nq/(q-1)  <=>  (q-1) val z > -nq
        if sv <= -(n as i64) * q {
            return Err(Error::OutOfDisk(format!(
                "{what} needs |z| < q^({}q/(q-1)); got scaled valuation {sv}/(q-1)",
                n
            )));
        }
    }
    Ok(())
}

/// `log_C(z) = Σ z^{q^i}/L_i` on the disk `|z| < q^{q/(q-1)}`.
pub fn carlitz_log(cache: &CarlitzCache, z: &ExtScalar, prec: i64) -> Result<ExtScalar> {
    check_disk(z, 1, "log_C")?;
    linearized_sum(z, prec, |i| cache.l(i), |i| cache.deg_l(i))
}

/// The `n`-th Carlitz polylogarithm `Σ z^{q^i}/L_i^n`.
pub fn polylog(cache: &CarlitzCache, n: u32, z: &ExtScalar, prec: i64) -> Result<ExtScalar> {
    if n == 0 {
        return Err(Error::Invalid(
            "polylogarithm index must be positive".into(),
        ));
    }
    check_disk(z, n, "polylog")?;
    linearized_sum(
        z,
        prec,
        |i| cache.l(i).pow(n as u64),
        |i| cache.deg_l(i).map(|d| d * n as i64),
    )
}

/// The Carlitz period `π̃ = θ θ̃ ∏_{i>=1} (1 - θ^{1-q^i})^{-1}`, every component
/// known to precision at least `prec`.
pub fn pi_tilde(cache: &CarlitzCache, prec: i64) -> ExtScalar {
    if let Some(v) = cache.pi_cached(prec) {
        return v;
    }
    let fq = cache.field().clone();
    let w = prec + 2;
    let mut unit = PrecSeries::one(&fq).truncate(w);
    for i in 1.. {
        let Some(step) = qpow(fq.q(), i).map(|qi| qi - 1).filter(|&s| s < w) else {
            break;
        };
        // (1 - θ^{-step})^{-1} = Σ_k θ^{-k step}
        let mut c = vec![crate::fq::Fe::ZERO; w as usize];
        for pos in (0..w as usize).step_by(step as usize) {
            c[pos] = crate::fq::Fe::ONE;
        }
        unit = unit.mul(&PrecSeries::from_terms(&fq, 0, c, w));
    }
    let theta_unit = unit.shift(1);
    let v = ExtScalar::theta_tilde(&fq)
        .scale_series(&theta_unit)
        .truncate(prec);
    cache.pi_store(prec, v.clone());
    v
}

/// `e(x) = exp_C(π̃ x)` for `x ∈ k`.
pub fn e_of(cache: &CarlitzCache, x: &RationalFunction, prec: i64) -> Result<ExtScalar> {
    let fq = cache.field();
    if x.is_zero() {
        return Ok(ExtScalar::zero(fq, EXACT));
    }
    let deg = x.degree().unwrap_or(0).max(0);
    let pi = pi_tilde(cache, prec + deg + 2);
    let xs = PrecSeries::from_rational(x, prec + 4);
    let z = pi.scale_series(&xs);
    carlitz_exp(cache, &z, prec)
}
