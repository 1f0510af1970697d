//! Degree-`d` power sums `S_d(n) = Σ_{a monic, deg a = d} a^{-n}`.
//!
//! The enumeration engine sums over all `q^d` monic polynomials. The
//! accelerated engine uses `∏_a (1 - X/a) = 1 - e_d(X)/D_d`, whose logarithmic
//! derivative gives `Σ_m S_d(m) X^{m-1} = β_0 / (1 - Σ_i β_i X^{q^i})` with
//! `β_i = c_i/D_d`, hence `S(m) = β_0 [m = 1] + Σ_{q^i < m} β_i S(m - q^i)`.

use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::factor::{monic_count, nth_monic};
use crate::par;
use crate::series::PrecSeries;

use super::CarlitzCache;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Accelerated once the gate check has passed, enumeration otherwise.
    Auto,
    Enumeration,
    Accelerated,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Auto => "auto",
            Engine::Enumeration => "enumeration",
            Engine::Accelerated => "accelerated",
        })
    }
}

#[derive(Clone, Debug)]
pub struct PowerSum {
    pub value: PrecSeries,
    pub engine: Engine,
}

pub fn powersum_enumerated(
    cache: &CarlitzCache,
    d: usize,
    n: u32,
    prec: i64,
    budget: u64,
) -> Result<PrecSeries> {
    let fq = cache.field().clone();
    let count = monic_count(fq.q(), d)
        .filter(|&c| c <= budget)
        .ok_or_else(|| {
            crate::Error::Budget(format!(
                "enumerating {}^{d} monic polynomials exceeds budget {budget}",
                fq.q()
            ))
        })?;
    let terms = par::map_range(count as usize, |k| {
        let a = nth_monic(&fq, d, k as u64);
        PrecSeries::inv_poly(&a.pow(n as u64), prec).expect("monic polynomial is nonzero")
    });
    Ok(terms
        .iter()
        .fold(PrecSeries::exact_zero(&fq), |acc, t| acc.add(t))
        .truncate(prec))
}

pub fn powersum_accelerated(cache: &CarlitzCache, d: usize, n: u32, prec: i64) -> PrecSeries {
    let fq = cache.field().clone();
    let beta = cache.beta(d, prec);
    let n = n as usize;
    let mut s: Vec<PrecSeries> = Vec::with_capacity(n + 1);
    s.push(PrecSeries::exact_zero(&fq));
    for m in 1..=n {
        let mut acc = if m == 1 {
            beta[0].clone()
        } else {
            PrecSeries::exact_zero(&fq)
        };
        let mut qi = 1usize;
        let mut i = 0;
        while qi < m && i < beta.len() {
            acc = acc.add(&beta[i].mul(&s[m - qi]));
            i += 1;
            qi = qi.saturating_mul(fq.q() as usize);
        }
        s.push(acc.truncate(prec));
    }
    s[n].clone()
}

/// Result of comparing the two engines on the validation grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateReport {
    pub passed: bool,
    pub prec: i64,
    pub max_degree: usize,
    pub max_n: u32,
    pub checked: usize,
    pub failure: Option<String>,
}

impl GateReport {
    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed,
            "precision": self.prec,
            "max_degree": self.max_degree,
            "max_n": self.max_n,
            "slices_checked": self.checked,
            "failure": self.failure,
        })
    }
}

pub const GATE_PREC: i64 = 100;
pub const GATE_MAX_N: u32 = 4;
const GATE_MAX_COUNT: u64 = 1024;

/// Checks the accelerated engine against enumeration for `d <= 5` (fewer when
/// `q^d` would exceed 1024 monics) and `n <= 4`. Computed once per cache.
pub fn gate_check(cache: &CarlitzCache) -> &GateReport {
    cache.gate.get_or_init(|| {
        let q = cache.field().q();
        let max_degree = (0..=5usize)
            .take_while(|&d| monic_count(q, d).is_some_and(|c| c <= GATE_MAX_COUNT))
            .last()
            .unwrap_or(0);
        let mut checked = 0;
        for d in 0..=max_degree {
            for n in 1..=GATE_MAX_N {
                let a = powersum_accelerated(cache, d, n, GATE_PREC);
                let e = match powersum_enumerated(cache, d, n, GATE_PREC, GATE_MAX_COUNT) {
                    Ok(e) => e,
                    Err(err) => {
                        return GateReport {
                            passed: false,
                            prec: GATE_PREC,
                            max_degree,
                            max_n: GATE_MAX_N,
                            checked,
                            failure: Some(err.to_string()),
                        }
                    }
                };
                checked += 1;
                if a != e {
                    return GateReport {
                        passed: false,
                        prec: GATE_PREC,
                        max_degree,
                        max_n: GATE_MAX_N,
                        checked,
                        failure: Some(format!("engines disagree at d={d}, n={n}")),
                    };
                }
            }
        }
        GateReport {
            passed: true,
            prec: GATE_PREC,
            max_degree,
            max_n: GATE_MAX_N,
            checked,
            failure: None,
        }
    })
}

/// `S_d(n)` at precision `prec` using the requested engine.
pub fn powersum(
    cache: &CarlitzCache,
    d: usize,
    n: u32,
    prec: i64,
    engine: Engine,
    budget: u64,
) -> Result<PowerSum> {
    let use_fast = match engine {
        Engine::Enumeration => false,
        Engine::Accelerated => true,
        Engine::Auto => gate_check(cache).passed,
    };
    if use_fast {
        Ok(PowerSum {
            value: powersum_accelerated(cache, d, n, prec),
            engine: Engine::Accelerated,
        })
    } else {
        Ok(PowerSum {
            value: powersum_enumerated(cache, d, n, prec, budget)?,
            engine: Engine::Enumeration,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::Fq;
    use crate::poly::{Poly, Var};
    use crate::rational::RationalFunction;

    #[test]
    fn s1_of_degree_one_q2() {
        let fq = Fq::new(2, 1).unwrap();
        let c = CarlitzCache::new(&fq);
        let l1 = Poly::from_ints(&fq, Var::Theta, &[0, 1, 1]);
        let expect = PrecSeries::from_rational(
            &RationalFunction::new(Poly::one(&fq, Var::Theta), l1).unwrap(),
            40,
        );
        assert_eq!(powersum_enumerated(&c, 1, 1, 40, 100).unwrap(), expect);
        assert_eq!(powersum_accelerated(&c, 1, 1, 40), expect);
        assert_eq!(
            powersum_accelerated(&c, 0, 3, 40),
            PrecSeries::one(&fq).truncate(40)
        );
    }

    #[test]
    fn gate_passes_small_fields() {
        for q in [2u64, 3] {
            let c = CarlitzCache::new(&Fq::with_order(q).unwrap());
            let r = gate_check(&c);
            assert!(r.passed, "{r:?}");
        }
    }
}
