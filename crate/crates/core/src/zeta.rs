//! Carlitz zeta values and their relations: Frobenius, Euler–Carlitz,
//! Anderson–Thakur, and the dimension counts built on them.

use serde_json::{json, Value};

use crate::carlitz::{gate_check, pi_tilde, polylog, powersum, Engine};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::ext::ExtScalar;
use crate::factor::monic_count;
use crate::par;
use crate::poly::Var;
use crate::rational::RationalFunction;
use crate::recognize::{find_relation_escalating, recognize_stable, Recognition, DEGREE_BOUNDS};
use crate::series::{PrecSeries, Valuation};

/// `ζ_C(n)` with the provenance of every degree slice.
#[derive(Clone, Debug)]
pub struct ZetaValue {
    pub n: u64,
    pub value: PrecSeries,
    pub requested_prec: i64,
    pub prec: i64,
    /// Engine used for the slice of each degree `0..=D`.
    pub engines: Vec<Engine>,
    pub warnings: Vec<String>,
}

impl ZetaValue {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "value": self.value.to_json(),
            "text": self.value.to_string(),
            "valuation": self.value.valuation().to_json(),
            "requested_precision": self.requested_prec,
            "precision": self.prec,
            "slice_engines": self.engines,
            "warnings": self.warnings,
        })
    }
}

fn resolve_engine(ctx: &Context) -> Engine {
    match ctx.cfg.engine {
        Engine::Auto if gate_check(&ctx.cache).passed => Engine::Accelerated,
        Engine::Auto => Engine::Enumeration,
        e => e,
    }
}

/// `ζ_C(n) = Σ_{d<=D} S_d(n)` with `D = ⌈P/n⌉`. When only enumeration is
/// available and `q^D` exceeds the budget, the precision is lowered to what
/// the affordable degrees certify and a warning is recorded.
pub fn zeta(ctx: &Context, n: u64, prec: i64) -> Result<ZetaValue> {
    if n == 0 {
        return Err(Error::Invalid(
            "zeta needs a positive integer argument".into(),
        ));
    }
    let n32 =
        u32::try_from(n).map_err(|_| Error::Invalid(format!("zeta argument {n} too large")))?;
    let engine = resolve_engine(ctx);
    let mut warnings = Vec::new();
    let ni = n as i64;
    let mut eff = prec;
    let mut top = ((prec + ni - 1) / ni).max(0) as usize;
    if engine == Engine::Enumeration {
        let q = ctx.fq.q();
        let affordable = (0..=top)
            .take_while(|&d| monic_count(q, d).is_some_and(|c| c <= ctx.cfg.budget))
            .last();
        let Some(affordable) = affordable else {
            return Err(Error::Budget("budget admits no degree slice".into()));
        };
        if affordable < top {
            eff = (affordable as i64 + 1) * ni;
            warnings.push(format!(
                "enumeration engine only: precision lowered from {prec} to {eff} (degrees <= {affordable} within budget {})",
                ctx.cfg.budget
            ));
            top = affordable;
        }
    } else {
        // slices vanish from the first degree whose normalized coefficients all vanish
        for d in 0..=top {
            if ctx.cache.beta(d, eff).iter().all(PrecSeries::is_zero) {
                top = d.saturating_sub(1);
                break;
            }
        }
    }
    let slices = par::map_range(top + 1, |d| {
        powersum(&ctx.cache, d, n32, eff, engine, ctx.cfg.budget)
    });
    let mut value = PrecSeries::exact_zero(&ctx.fq);
    let mut engines = Vec::with_capacity(slices.len());
    for s in slices {
        let s = s?;
        value = value.add(&s.value);
        engines.push(s.engine);
    }
    Ok(ZetaValue {
        n,
        value: value.truncate(eff),
        requested_prec: prec,
        prec: eff,
        engines,
        warnings,
    })
}

#[derive(Clone, Debug)]
pub struct FrobeniusCertificate {
    pub n: u64,
    pub m: u32,
    pub lhs_prec: i64,
    pub rhs_prec: i64,
    pub matched_prec: i64,
    pub residual: Valuation,
    pub guard: i64,
    pub passed: bool,
}

impl FrobeniusCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "relation": "frobenius",
            "n": self.n,
            "m": self.m,
            "lhs_precision": self.lhs_prec,
            "rhs_precision": self.rhs_prec,
            "matched_precision": self.matched_prec,
            "residual_valuation": self.residual.to_json(),
            "guard": self.guard,
            "passed": self.passed,
        })
    }
}

/// Compares `lhs` with `base^{p^m}` at the smaller of the two precisions.
pub fn frobenius_compare(
    n: u64,
    m: u32,
    lhs: &PrecSeries,
    base: &PrecSeries,
    guard: i64,
) -> FrobeniusCertificate {
    let rhs = base.pth_power(m, Some(lhs.prec()));
    let matched = lhs.prec().min(rhs.prec());
    let residual = lhs.sub(&rhs).valuation();
    FrobeniusCertificate {
        n,
        m,
        lhs_prec: lhs.prec(),
        rhs_prec: rhs.prec(),
        matched_prec: matched,
        residual,
        guard,
        passed: residual.certainly_ge(matched - guard),
    }
}

/// Checks `ζ(p^m n) = ζ(n)^{p^m}`.
pub fn frobenius_check(ctx: &Context, n: u64, m: u32, prec: i64) -> Result<FrobeniusCertificate> {
    let pm = (ctx.fq.p() as u64)
        .checked_pow(m)
        .and_then(|pm| pm.checked_mul(n))
        .ok_or_else(|| Error::Budget(format!("p^{m}·{n} overflows")))?;
    let lhs = zeta(ctx, pm, prec)?;
    let base = zeta(ctx, n, prec)?;
    Ok(frobenius_compare(
        n,
        m,
        &lhs.value,
        &base.value,
        ctx.cfg.guard,
    ))
}

/// `ζ(n)/π̃^n` as a series in `k_∞`; requires `(q-1) | n`.
pub fn euler_carlitz_series(ctx: &Context, n: u64, prec: i64) -> Result<PrecSeries> {
    let q1 = ctx.fq.q() as u64 - 1;
    if n == 0 || !n.is_multiple_of(q1) {
        return Err(Error::Invalid(format!(
            "Euler–Carlitz ratio needs n divisible by q-1 = {q1}, got n = {n}"
        )));
    }
    let z = zeta(ctx, n, prec)?;
    let pi = pi_tilde(&ctx.cache, prec + 2);
    let ratio = ExtScalar::from_series(z.value).div(&pi.pow(n))?;
    for (i, c) in ratio.components().iter().enumerate().skip(1) {
        if !c.is_zero() {
            return Err(Error::Invalid(format!(
                "ratio has a nonzero θ̃^{i}-component"
            )));
        }
    }
    Ok(ratio.component(0).clone())
}

#[derive(Clone, Debug)]
pub struct EulerCarlitzCertificate {
    pub n: u64,
    pub recognition: Recognition,
}

impl EulerCarlitzCertificate {
    pub fn to_json(&self) -> Value {
        json!({ "relation": "euler-carlitz", "n": self.n, "recognition": self.recognition.to_json() })
    }
}

/// Recognizes `ζ(n)/π̃^n ∈ k` at `P` and again at `P + 20`.
pub fn euler_carlitz_ratio(ctx: &Context, n: u64) -> Result<EulerCarlitzCertificate> {
    let p = ctx.cfg.prec;
    let recognition = recognize_stable(&[p, p + 20], ctx.cfg.guard, |pp| {
        euler_carlitz_series(ctx, n, pp)
    })?;
    Ok(EulerCarlitzCertificate { n, recognition })
}

/// Largest `i` with `i < nq/(q-1)`.
pub fn ell_bound(q: u64, n: u64) -> u64 {
    (n * q - 1) / (q - 1)
}

/// `log_C^{[n]}(θ^i)` for `0 <= i <= ℓ`, as series in `k_∞`.
pub fn polylog_family(ctx: &Context, n: u64, prec: i64) -> Result<Vec<PrecSeries>> {
    let n32 =
        u32::try_from(n).map_err(|_| Error::Invalid(format!("polylog index {n} too large")))?;
    let ell = ell_bound(ctx.fq.q() as u64, n);
    let args: Vec<i64> = (0..=ell as i64).collect();
    par::map_slice(&args, |&i| {
        let a = ExtScalar::from_series(PrecSeries::theta_pow(&ctx.fq, i));
        polylog(&ctx.cache, n32, &a, prec).map(|v| v.component(0).clone())
    })
    .into_iter()
    .collect()
}

/// Greedy smallest-index-first basis of the polylog family: `ι` and `m_n = #ι - 1`.
pub fn polylog_basis(family: &[PrecSeries], guard: i64) -> Result<Vec<usize>> {
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..family.len() {
        let mut fam: Vec<PrecSeries> = kept.iter().map(|&k| family[k].clone()).collect();
        fam.push(family[i].clone());
        if find_relation_escalating(&fam, &DEGREE_BOUNDS, guard)?
            .relation
            .is_none()
        {
            kept.push(i);
        }
    }
    Ok(kept)
}

#[derive(Clone, Debug)]
struct AtSolution {
    iota: Vec<usize>,
    h: Vec<RationalFunction>,
    degree_bound: usize,
    residual: Valuation,
    engines: Vec<Engine>,
}

fn at_solve_at(ctx: &Context, n: u64, prec: i64) -> Result<AtSolution> {
    let fam = polylog_family(ctx, n, prec)?;
    let basis = polylog_basis(&fam, ctx.cfg.guard)?;
    let z = zeta(ctx, n, prec)?;
    let mut vecs = vec![z.value.clone()];
    vecs.extend(basis.iter().map(|&i| fam[i].clone()));
    let search = find_relation_escalating(&vecs, &DEGREE_BOUNDS, ctx.cfg.guard)?;
    let rel = search.relation.ok_or_else(|| {
        Error::Precision(format!(
            "no relation between ζ({n}) and {} polylogarithms at precision {prec}, degree bounds {:?}",
            basis.len(),
            search.degree_bounds_tried
        ))
    })?;
    let a0 = rel.coeffs[0].clone();
    if a0.is_zero() {
        return Err(Error::Precision(format!(
            "relation at precision {prec} does not involve ζ({n})"
        )));
    }
    let ell = fam.len();
    let mut h = vec![RationalFunction::zero(&ctx.fq, Var::Theta); ell];
    for (j, &i) in basis.iter().enumerate() {
        h[i] = RationalFunction::new(rel.coeffs[j + 1].neg(), a0.clone())?;
    }
    // ι(0) must carry a nonzero coefficient so ζ can replace it in the basis
    let mut iota = basis.clone();
    if let Some(pos) = iota.iter().position(|&i| !h[i].is_zero()) {
        let first = iota.remove(pos);
        iota.insert(0, first);
    }
    let combo = h
        .iter()
        .zip(&fam)
        .filter(|(c, _)| !c.is_zero())
        .fold(PrecSeries::exact_zero(&ctx.fq), |acc, (c, s)| {
            acc.add(&s.mul(&PrecSeries::from_rational(c, prec + 64)))
        });
    let residual = z.value.sub(&combo).valuation();
    Ok(AtSolution {
        iota,
        h,
        degree_bound: rel.degree_bound,
        residual,
        engines: z.engines,
    })
}

/// Certificate for `ζ(n) = Σ h_i log_C^{[n]}(θ^i)`.
#[derive(Clone, Debug)]
pub struct AtCertificate {
    pub n: u64,
    /// Largest admissible index `⌈nq/(q-1)⌉ - 1`.
    pub ell_bound: u64,
    /// Largest index with a nonzero coefficient.
    pub ell_n: Option<usize>,
    pub iota: Vec<usize>,
    pub h: Vec<RationalFunction>,
    pub m_n: usize,
    pub degree_bound: usize,
    pub precisions: Vec<i64>,
    pub residuals: Vec<Valuation>,
    pub guard: i64,
    pub reverified: bool,
    pub engines: Vec<Engine>,
}

impl AtCertificate {
    pub fn combination_ok(&self) -> bool {
        self.residuals
            .iter()
            .zip(&self.precisions)
            .all(|(r, p)| r.certainly_ge(p - self.guard))
    }

    pub fn passed(&self) -> bool {
        self.reverified && self.combination_ok()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "relation": "anderson-thakur",
            "n": self.n,
            "ell_bound": self.ell_bound,
            "ell_n": self.ell_n,
            "iota": self.iota,
            "h": self.h.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "h_exact": self.h.iter().map(RationalFunction::to_json).collect::<Vec<_>>(),
            "m_n": self.m_n,
            "degree_bound": self.degree_bound,
            "precisions": self.precisions,
            "residual_valuations": self.residuals.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
            "guard": self.guard,
            "reverified": self.reverified,
            "slice_engines": self.engines,
            "passed": self.passed(),
        })
    }
}

/// Recovers the Anderson–Thakur coefficients at `P`, then repeats at `P + 20`.
pub fn anderson_thakur_solve(ctx: &Context, n: u64) -> Result<AtCertificate> {
    let p = ctx.cfg.prec;
    let a = at_solve_at(ctx, n, p)?;
    let b = at_solve_at(ctx, n, p + 20)?;
    let reverified = a.h == b.h && a.iota == b.iota;
    let ell_n = a.h.iter().rposition(|c| !c.is_zero());
    Ok(AtCertificate {
        n,
        ell_bound: ell_bound(ctx.fq.q() as u64, n),
        ell_n,
        m_n: a.iota.len() - 1,
        iota: a.iota,
        h: a.h,
        degree_bound: a.degree_bound,
        precisions: vec![p, p + 20],
        residuals: vec![a.residual, b.residual],
        guard: ctx.cfg.guard,
        reverified,
        engines: a.engines,
    })
}

/// `U(s) = {1 <= n <= s : p ∤ n, (q-1) ∤ n}`.
pub fn u_set(p: u64, q: u64, s: u64) -> Vec<u64> {
    (1..=s).filter(|n| n % p != 0 && n % (q - 1) != 0).collect()
}

/// `s - ⌊s/p⌋ - ⌊s/(q-1)⌋ + ⌊s/(p(q-1))⌋ + 1`.
pub fn zeta_trdeg(p: u64, q: u64, s: u64) -> u64 {
    s + s / (p * (q - 1)) + 1 - s / p - s / (q - 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisDim {
    pub s: u64,
    pub dim: u64,
    /// `(n, m_n, ι)` for each `n ∈ U(s)`.
    pub blocks: Vec<(u64, usize, Vec<usize>)>,
}

impl GaloisDim {
    pub fn to_json(&self) -> Value {
        json!({
            "s": self.s,
            "dimension": self.dim,
            "blocks": self.blocks.iter().map(|(n, m, iota)| json!({"n": n, "m_n": m, "iota": iota})).collect::<Vec<_>>(),
        })
    }
}

/// `1 + Σ_{n ∈ U(s)} (m_n + 1)` with `m_n` from the numerically computed polylog rank.
pub fn zeta_galois_dim(ctx: &Context, s: u64) -> Result<GaloisDim> {
    let mut blocks = Vec::new();
    for n in u_set(ctx.fq.p() as u64, ctx.fq.q() as u64, s) {
        let fam = polylog_family(ctx, n, ctx.cfg.prec)?;
        let iota = polylog_basis(&fam, ctx.cfg.guard)?;
        blocks.push((n, iota.len() - 1, iota));
    }
    let dim = 1 + blocks.iter().map(|(_, m, _)| *m as u64 + 1).sum::<u64>();
    Ok(GaloisDim { s, dim, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Config;

    fn ctx(q: u64, prec: i64) -> Context {
        Context::with_order(
            q,
            Config {
                prec,
                ..Config::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn zeta_leading_term() {
        let c = ctx(3, 40);
        let z = zeta(&c, 2, 40).unwrap();
        assert_eq!(z.value.valuation(), Valuation::Exact(0));
        assert_eq!(z.value.leading_coeff(), Some(crate::fq::Fe::ONE));
        let hi = zeta(&c, 2, 60).unwrap();
        assert!(hi.value.agrees_with(&z.value, 0));
    }

    #[test]
    fn formulas() {
        assert_eq!(u_set(3, 3, 4), vec![1]);
        assert!(u_set(2, 2, 9).is_empty());
        assert_eq!(u_set(2, 4, 5), vec![1, 5]);
        assert_eq!(zeta_trdeg(3, 3, 4), 2);
        assert_eq!(zeta_trdeg(2, 2, 7), 1);
        assert_eq!(zeta_trdeg(5, 5, 1), 2);
    }
}
