//! The geometric Gamma function `Γ(z) = z^{-1} ∏_{n ∈ A_+} (1 + z/n)^{-1}`,
//! the factorial `Π(z) = zΓ(z)`, the group `A_f` of formal combinations of
//! classes in `(1/f)A/A`, diamond brackets, relation certificates and the
//! transcendence-degree counts.
//!
//! The degree-`d` factor of `Π(r)` is `B_d(r) = D_d / (e_d(r) + D_d)`, and
//! `e_d(r)/D_d = Σ_i (r / L_{d-i})^{q^i} / D_i`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_rational::Ratio;
use serde_json::{json, Value};

use crate::carlitz::{pi_tilde, CarlitzCache, Engine};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::ext::ExtScalar;
use crate::factor::{euler_phi_a, monic_count, nth_monic, nth_residue};
use crate::fq::{Fe, Fq};
use crate::par;
use crate::poly::{Poly, Var};
use crate::rational::RationalFunction;
use crate::recognize::{recognize_stable, Outcome, Recognition};
use crate::series::{PrecSeries, Valuation};
use crate::zeta::zeta_trdeg;

fn val_of(r: &RationalFunction) -> i64 {
    -r.degree().expect("nonzero")
}

/// Poles of `Π` are the `r` with `-r` monic (including `r = -1`).
fn check_pi_pole(r: &RationalFunction) -> Result<()> {
    if let Some(p) = r.as_polynomial() {
        if !p.is_zero() && p.neg().is_monic() {
            return Err(Error::Pole(format!("Π has a pole at {r} (−r is monic)")));
        }
    }
    Ok(())
}

/// `e_d(r)/D_d` to absolute precision `abs`.
fn ed_over_dd(
    cache: &CarlitzCache,
    d: usize,
    r: &RationalFunction,
    abs: i64,
) -> Result<PrecSeries> {
    let fq = cache.field();
    let vr = val_of(r);
    let mut acc = PrecSeries::exact_zero(fq);
    for i in 0..=d {
        let qi = crate::carlitz::qpow(fq.q(), i);
        let e = cache
            .deg_l(d - i)
            .and_then(|dl| vr.checked_add(dl))
            .and_then(|x| x.checked_add(i as i64));
        // the term has valuation q^i · e
        let tv = match (qi, e) {
            (Some(qi), Some(e)) => qi.checked_mul(e),
            _ => None,
        };
        match (tv, e) {
            (Some(tv), _) if tv >= abs => continue,
            (None, Some(e)) if e > 0 => continue,
            (None, None) => continue,
            (None, Some(_)) => {
                return Err(Error::Precision(format!(
                    "degree-{d} factor term {i} has an unrepresentable valuation"
                )))
            }
            _ => {}
        }
        let qi = qi.expect("checked");
        let vs = e.expect("checked") - i as i64;
        let s = r.div(&RationalFunction::new(
            cache.l(d - i),
            Poly::one(fq, Var::Theta),
        )?)?;
        let a_s = (abs + qi - 1).div_euclid(qi) - i as i64;
        let s_ser = PrecSeries::from_rational(&s, a_s.max(vs + 1));
        let f = s_ser.frobenius(i as u32, None);
        let dinv = PrecSeries::inv_poly(&cache.d(i), abs - qi * vs + 1)?;
        acc = acc.add(&f.mul(&dinv));
    }
    Ok(acc.truncate(abs))
}

/// `B_d(r)` to relative precision `rel` from the closed form.
pub fn gamma_block_accelerated(
    cache: &CarlitzCache,
    d: usize,
    r: &RationalFunction,
    rel: i64,
) -> Result<PrecSeries> {
    let fq = cache.field();
    let mut abs = rel;
    for _ in 0..3 {
        let binv = PrecSeries::one(fq)
            .add(&ed_over_dd(cache, d, r, abs)?)
            .truncate(abs);
        match binv.valuation() {
            Valuation::Exact(v) if abs - v >= rel => {
                let b = binv.inv()?;
                return Ok(b.truncate(-v + rel));
            }
            Valuation::Exact(v) => abs = rel + v,
            Valuation::AtLeast(_) => abs += rel,
        }
    }
    Err(Error::Precision(format!(
        "degree-{d} Gamma factor at {r} cancels beyond the working precision"
    )))
}

/// `B_d(r) = ∏_{n monic, deg n = d} n/(n + r)` to relative precision `rel`, by enumeration.
pub fn gamma_block_enumerated(
    fq: &Fq,
    d: usize,
    r: &RationalFunction,
    rel: i64,
    budget: u64,
) -> Result<PrecSeries> {
    let count = monic_count(fq.q(), d)
        .filter(|&c| c <= budget)
        .ok_or_else(|| {
            Error::Budget(format!(
                "degree-{d} Gamma factor needs more than {budget} monic polynomials"
            ))
        })?;
    let factors = par::map_range(count as usize, |k| -> Result<PrecSeries> {
        let n = RationalFunction::new(nth_monic(fq, d, k as u64), Poly::one(fq, Var::Theta))?;
        let x = n
            .div(&n.add(r))
            .map_err(|_| Error::Pole(format!("Π has a pole at {r}")))?;
        Ok(PrecSeries::from_rational(&x, rel + val_of(&x)))
    });
    let mut acc = PrecSeries::one(fq);
    for f in factors {
        acc = acc.mul(&f?);
    }
    let v = acc.valuation().lower();
    Ok(acc.truncate(v + rel))
}

/// Accelerated vs enumerated Gamma factors on a fixed set of arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGateReport {
    pub passed: bool,
    pub rel_prec: i64,
    pub max_degree: usize,
    pub arguments: Vec<String>,
    pub checked: usize,
    pub failure: Option<String>,
}

impl BlockGateReport {
    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed,
            "relative_precision": self.rel_prec,
            "max_degree": self.max_degree,
            "arguments": self.arguments,
            "blocks_checked": self.checked,
            "failure": self.failure,
        })
    }
}

pub const BLOCK_GATE_PREC: i64 = 60;
const BLOCK_GATE_MAX_DEGREE: usize = 4;
const BLOCK_GATE_MAX_COUNT: u64 = 1024;

fn gate_arguments(fq: &Fq) -> Vec<RationalFunction> {
    let th = RationalFunction::x(fq, Var::Theta);
    let one = RationalFunction::one(fq, Var::Theta);
    let inv_th = th.inv().expect("θ ≠ 0");
    vec![
        inv_th.clone(),
        th.add(&one)
            .div(&th.pow(2).expect("power"))
            .expect("θ² ≠ 0"),
        th.add(&inv_th),
        one.div(&th.pow(2).expect("power").add(&one))
            .expect("θ² + 1 ≠ 0"),
        th.pow(2).expect("power").add(&th),
    ]
}

/// Gate for the closed-form Gamma factor: exact agreement with enumeration for
/// `d <= 4` (fewer when `q^d` exceeds 1024). Computed once per cache.
pub fn gamma_gate(cache: &CarlitzCache) -> &BlockGateReport {
    cache.gamma_gate.get_or_init(|| {
        let fq = cache.field().clone();
        let max_degree = (0..=BLOCK_GATE_MAX_DEGREE)
            .take_while(|&d| monic_count(fq.q(), d).is_some_and(|c| c <= BLOCK_GATE_MAX_COUNT))
            .last()
            .unwrap_or(0);
        let args = gate_arguments(&fq);
        let mut report = BlockGateReport {
            passed: true,
            rel_prec: BLOCK_GATE_PREC,
            max_degree,
            arguments: args.iter().map(|a| a.to_string()).collect(),
            checked: 0,
            failure: None,
        };
        for r in &args {
            if check_pi_pole(r).is_err() {
                continue;
            }
            for d in 0..=max_degree {
                let a = gamma_block_accelerated(cache, d, r, BLOCK_GATE_PREC);
                let e = gamma_block_enumerated(&fq, d, r, BLOCK_GATE_PREC, BLOCK_GATE_MAX_COUNT);
                report.checked += 1;
                let ok = matches!((&a, &e), (Ok(a), Ok(e)) if a == e);
                if !ok {
                    report.passed = false;
                    report.failure = Some(format!("factors disagree at d = {d}, r = {r}"));
                    return report;
                }
            }
        }
        report
    })
}

/// A value of `Π` or `Γ` with its evaluation data.
#[derive(Clone, Debug)]
pub struct GammaValue {
    pub argument: RationalFunction,
    pub value: PrecSeries,
    pub blocks: usize,
    pub engine: Engine,
    pub warnings: Vec<String>,
}

impl GammaValue {
    pub fn to_json(&self) -> Value {
        json!({
            "argument": self.argument.to_string(),
            "value": self.value.to_json(),
            "text": self.value.to_string(),
            "valuation": self.value.valuation().to_json(),
            "precision": self.value.prec(),
            "blocks": self.blocks,
            "engine": self.engine,
            "warnings": self.warnings,
        })
    }
}

fn pi_rel(ctx: &Context, r: &RationalFunction, rel: i64) -> Result<GammaValue> {
    check_pi_pole(r)?;
    let fq = &ctx.fq;
    if r.is_zero() {
        return Ok(GammaValue {
            argument: r.clone(),
            value: PrecSeries::one(fq),
            blocks: 0,
            engine: Engine::Accelerated,
            warnings: vec![],
        });
    }
    let vr = val_of(r);
    let engine = match ctx.cfg.engine {
        Engine::Auto if gamma_gate(&ctx.cache).passed => Engine::Accelerated,
        Engine::Auto => Engine::Enumeration,
        e => e,
    };
    let mut warnings = Vec::new();
    let mut rel = rel;
    // factors with d + val(r) >= rel are 1 to relative precision rel
    let mut top = (rel - vr - 1).max(0) as usize;
    if engine == Engine::Enumeration {
        let affordable = (0..=top)
            .take_while(|&d| monic_count(fq.q(), d).is_some_and(|c| c <= ctx.cfg.budget))
            .last()
            .ok_or_else(|| Error::Budget("budget admits no Gamma factor".into()))?;
        if affordable < top {
            let lowered = affordable as i64 + 1 + vr;
            warnings.push(format!(
                "enumeration engine only: relative precision lowered from {rel} to {lowered} (degrees <= {affordable} within budget {})",
                ctx.cfg.budget
            ));
            rel = lowered;
            top = affordable;
        }
    }
    let blocks = par::map_range(top + 1, |d| match engine {
        Engine::Enumeration => gamma_block_enumerated(fq, d, r, rel, ctx.cfg.budget),
        _ => gamma_block_accelerated(&ctx.cache, d, r, rel),
    });
    let mut acc = PrecSeries::one(fq);
    for b in blocks {
        acc = acc.mul(&b?);
    }
    let v = acc.valuation().lower();
    Ok(GammaValue {
        argument: r.clone(),
        value: acc.truncate(v + rel),
        blocks: top + 1,
        engine,
        warnings,
    })
}

fn to_absolute(
    ctx: &Context,
    r: &RationalFunction,
    prec: i64,
    f: impl Fn(&Context, &RationalFunction, i64) -> Result<GammaValue>,
) -> Result<GammaValue> {
    let mut rel = prec + 4;
    if !r.is_zero() {
        rel += (-val_of(r)).max(0);
    }
    for _ in 0..3 {
        let g = f(ctx, r, rel)?;
        if g.value.prec() >= prec || !g.warnings.is_empty() {
            return Ok(g);
        }
        rel += prec - g.value.prec();
    }
    f(ctx, r, rel)
}

/// `Π(r)` to absolute precision at least `prec`.
pub fn pi_eval(ctx: &Context, r: &RationalFunction, prec: i64) -> Result<GammaValue> {
    to_absolute(ctx, r, prec, pi_rel)
}

/// `Γ(r) = Π(r)/r` to absolute precision at least `prec`.
pub fn gamma_eval(ctx: &Context, r: &RationalFunction, prec: i64) -> Result<GammaValue> {
    if r.is_zero() {
        return Err(Error::Pole("Γ has a pole at 0".into()));
    }
    to_absolute(ctx, r, prec, |ctx, r, rel| {
        let mut g = pi_rel(ctx, r, rel)?;
        let rinv = PrecSeries::from_rational(&r.inv()?, rel + 2 * val_of(r).abs() + g.value.prec());
        let v = g.value.mul(&rinv);
        let vv = v.valuation().lower();
        g.value = v.truncate(vv + rel);
        Ok(g)
    })
}

/// An element of `A_f`: integer multiplicities on the classes `[a/f]`, `deg a < deg f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaDivisor {
    f: Poly,
    terms: BTreeMap<Poly, i64>,
}

impl GammaDivisor {
    pub fn new(f: &Poly) -> Result<Self> {
        if !f.is_monic() || f.is_constant() {
            return Err(Error::Invalid(format!(
                "modulus must be monic of positive degree, got {f}"
            )));
        }
        Ok(GammaDivisor {
            f: f.clone(),
            terms: BTreeMap::new(),
        })
    }

    pub fn from_terms(f: &Poly, terms: impl IntoIterator<Item = (Poly, i64)>) -> Result<Self> {
        let mut d = Self::new(f)?;
        for (a, m) in terms {
            d.add_term(&a, m)?;
        }
        Ok(d)
    }

    /// `[a/f]`.
    pub fn unit(f: &Poly, a: &Poly) -> Result<Self> {
        Self::from_terms(f, [(a.clone(), 1)])
    }

    fn add_term(&mut self, a: &Poly, m: i64) -> Result<()> {
        let a = a.clone().with_var(Var::Theta).rem(&self.f)?;
        let e = self.terms.entry(a.clone()).or_insert(0);
        *e += m;
        if *e == 0 {
            self.terms.remove(&a);
        }
        Ok(())
    }

    pub fn modulus(&self) -> &Poly {
        &self.f
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Poly, i64)> {
        self.terms.iter().map(|(a, &m)| (a, m))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.terms.values().all(|&m| m >= 0)
    }

    fn same_modulus(&self, o: &Self) -> Result<()> {
        if self.f != o.f {
            return Err(Error::Invalid(format!(
                "moduli differ: {} vs {}",
                self.f, o.f
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_modulus(o)?;
        let mut out = self.clone();
        for (a, &m) in &o.terms {
            out.add_term(a, m)?;
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Self {
        let terms = if k == 0 {
            BTreeMap::new()
        } else {
            self.terms
                .iter()
                .map(|(a, &m)| (a.clone(), m * k))
                .collect()
        };
        GammaDivisor {
            f: self.f.clone(),
            terms,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    /// `wt`: `1/(q-1)` per nonzero class, `0` for the zero class.
    pub fn weight(&self) -> Ratio<i64> {
        let q1 = self.f.field().q() as i64 - 1;
        self.terms
            .iter()
            .filter(|(a, _)| !a.is_zero())
            .fold(Ratio::from_integer(0), |acc, (_, &m)| {
                acc + Ratio::new(m, q1)
            })
    }

    /// `a ⋆ 𝐚`, pushing classes forward along multiplication by `a`.
    pub fn star(&self, a: &Poly) -> Result<Self> {
        let a = a.clone().with_var(Var::Theta);
        if !a.gcd(&self.f).is_one() {
            return Err(Error::Invalid(format!(
                "{a} is not coprime to the modulus {}",
                self.f
            )));
        }
        let mut out = GammaDivisor::new(&self.f)?;
        for (b, &m) in &self.terms {
            out.add_term(&a.mul(b), m)?;
        }
        Ok(out)
    }

    /// The representative `a/f` of each class.
    pub fn representative(&self, a: &Poly) -> RationalFunction {
        RationalFunction::new(a.clone(), self.f.clone()).expect("monic modulus")
    }

    /// `Σ m_a ⟨a/f⟩_N`.
    pub fn bracket_n(&self, n: u64) -> i64 {
        self.terms
            .iter()
            .map(|(a, &m)| m * bracket_n(&self.representative(a), n) as i64)
            .sum()
    }

    /// `Σ m_a ⟨a/f⟩`.
    pub fn bracket(&self) -> i64 {
        self.terms
            .iter()
            .map(|(a, &m)| m * bracket(&self.representative(a)) as i64)
            .sum()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "f": self.f.to_json(),
            "terms": self.terms.iter().map(|(a, m)| json!([a.to_json(), m])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(fq: &Fq, v: &Value) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed divisor JSON: {v}"));
        let f = Poly::from_json(fq, v.get("f").ok_or_else(bad)?)?;
        let mut d = Self::new(&f)?;
        for t in v.get("terms").and_then(Value::as_array).ok_or_else(bad)? {
            let pair = t.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
            let a = Poly::from_json(fq, &pair[0])?;
            let m = pair[1].as_i64().ok_or_else(bad)?;
            d.add_term(&a, m)?;
        }
        Ok(d)
    }
}

/// Coefficients `c_1, …, c_k` of `θ^{-1}, …, θ^{-k}` in the fractional part of `x`.
fn fractional_coeffs(x: &RationalFunction, k: i64) -> Vec<Fe> {
    let (_, frac) = x.integer_part();
    let s = PrecSeries::from_rational(&frac, k + 1);
    (1..=k).map(|i| s.coeff(i).unwrap_or(Fe::ZERO)).collect()
}

/// `⟨x⟩_N` from the expansion of the fractional part: `c_i = 0` for `i <= N` and `c_{N+1} = 1`.
pub fn bracket_n(x: &RationalFunction, n: u64) -> u8 {
    let k = n as i64 + 1;
    let c = fractional_coeffs(x, k);
    let ok = c[..n as usize].iter().all(|c| c.is_zero()) && c[n as usize] == Fe::ONE;
    ok as u8
}

/// `⟨x⟩_N` by scanning `a ∈ A` with `deg a <= max(3, deg x)` for
/// `|x - a - θ^{-N-1}| < |θ|^{-N-1}`.
pub fn bracket_n_literal(x: &RationalFunction, n: u64) -> u8 {
    let fq = x.field();
    let max_deg = x.degree().unwrap_or(0).max(3) as usize;
    let target = RationalFunction::x_pow(fq, Var::Theta, -(n as i64) - 1);
    let need = n as i64 + 2;
    let total = monic_count(fq.q(), max_deg + 1).expect("small scan");
    (0..total).any(|k| {
        let a = RationalFunction::new(nth_residue(fq, k, Var::Theta), Poly::one(fq, Var::Theta))
            .expect("unit den");
        let diff = x.sub(&a).sub(&target);
        PrecSeries::from_rational(&diff, need)
            .valuation()
            .certainly_ge(need)
    }) as u8
}

/// Largest `N` for which `⟨x⟩_N` can be nonzero.
fn bracket_range(x: &RationalFunction) -> u64 {
    x.den().deg_i64().max(0) as u64
}

/// `⟨x⟩ = Σ_N ⟨x⟩_N`; at most one term is nonzero.
pub fn bracket(x: &RationalFunction) -> u8 {
    (0..=bracket_range(x)).map(|n| bracket_n(x, n)).sum()
}

pub fn bracket_literal(x: &RationalFunction) -> u8 {
    (0..=bracket_range(x) + 1)
        .map(|n| bracket_n_literal(x, n))
        .sum()
}

/// Residues modulo `f` coprime to `f`, in enumeration order.
pub fn unit_residues(f: &Poly) -> Vec<Poly> {
    let fq = f.field();
    let total = monic_count(fq.q(), f.deg_i64() as usize).expect("modulus degree in range");
    (0..total)
        .map(|k| nth_residue(fq, k, Var::Theta))
        .filter(|a| a.gcd(f).is_one())
        .collect()
}

/// `a ↦ ⟨a ⋆ 𝐚⟩` over `(A/f)^×`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketProfile {
    pub entries: Vec<(Poly, i64)>,
    pub warnings: Vec<String>,
}

impl BracketProfile {
    pub fn to_json(&self) -> Value {
        json!({
            "profile": self.entries.iter().map(|(a, v)| json!([a.to_string(), v])).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }
}

pub fn bracket_profile(div: &GammaDivisor) -> Result<BracketProfile> {
    let mut warnings = Vec::new();
    if !div.is_effective() {
        warnings.push("divisor is not effective".to_string());
    }
    let entries = unit_residues(div.modulus())
        .into_iter()
        .map(|a| Ok((a.clone(), div.star(&a)?.bracket())))
        .collect::<Result<Vec<_>>>()?;
    Ok(BracketProfile { entries, warnings })
}

/// `∏_a Π(a/f)^{m_a}`.
pub fn pi_monomial_eval(ctx: &Context, div: &GammaDivisor, prec: i64) -> Result<PrecSeries> {
    let mut acc = PrecSeries::one(&ctx.fq);
    for (a, m) in div.terms() {
        if a.is_zero() {
            continue;
        }
        let v = pi_eval(ctx, &div.representative(a), prec + 4)?.value;
        acc = acc.mul(&v.powi(m)?);
    }
    Ok(acc)
}

/// Recognition outcome for one `θ̃`-component (or for `w^{q-1}`).
#[derive(Clone, Debug)]
pub struct ComponentRecognition {
    pub component: Option<usize>,
    pub recognition: Recognition,
}

/// Result of probing a `Γ`-monomial for membership in `k(θ̃)`.
#[derive(Clone, Debug)]
pub struct MonomialCertificate {
    pub label: String,
    pub factors: Vec<(String, i64)>,
    pub pi_exponent: i64,
    pub value: ExtScalar,
    pub components: Vec<ComponentRecognition>,
    pub power: Option<ComponentRecognition>,
    pub outcome: Outcome,
    pub precisions: Vec<i64>,
}

impl MonomialCertificate {
    pub fn is_recognized(&self) -> bool {
        self.outcome == Outcome::Recognized
    }

    pub fn to_json(&self) -> Value {
        let comp = |c: &ComponentRecognition| json!({"component": c.component, "recognition": c.recognition.to_json()});
        json!({
            "relation": self.label,
            "factors": self.factors.iter().map(|(a, e)| json!({"gamma_argument": a, "exponent": e})).collect::<Vec<_>>(),
            "pi_exponent": self.pi_exponent,
            "value": self.value.to_json(),
            "components": self.components.iter().map(comp).collect::<Vec<_>>(),
            "power_q_minus_1": self.power.as_ref().map(comp),
            "outcome": self.outcome,
            "precisions": self.precisions,
        })
    }
}

/// Recognizes the components of `value(p)` in `k` for every `p` in `precs`
/// (same rationals required), and the single component of `value(p)^{q-1}`
/// when `value` is a `θ̃`-monomial.
pub fn monomial_recognize_with(
    precs: &[i64],
    guard: i64,
    mut value: impl FnMut(i64) -> Result<ExtScalar>,
) -> Result<(
    ExtScalar,
    Vec<ComponentRecognition>,
    Option<ComponentRecognition>,
    Outcome,
)> {
    let vals: Vec<ExtScalar> = precs.iter().map(|&p| value(p)).collect::<Result<_>>()?;
    let first = vals[0].clone();
    if first.is_zero() {
        return Err(Error::Precision(
            "value is zero at the working precision".into(),
        ));
    }
    let q1 = first.field().q() as u64 - 1;
    let mut comps = Vec::new();
    for (j, c) in first.components().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut it = vals.iter();
        let recognition = recognize_stable(precs, guard, |_| {
            Ok(it.next().expect("one per precision").component(j).clone())
        })?;
        comps.push(ComponentRecognition {
            component: Some(j),
            recognition,
        });
    }
    let power = if first.as_monomial().is_some() {
        let mut it = vals.iter();
        let recognition = recognize_stable(precs, guard, |_| {
            Ok(it
                .next()
                .expect("one per precision")
                .pow(q1)
                .component(0)
                .clone())
        })?;
        Some(ComponentRecognition {
            component: None,
            recognition,
        })
    } else {
        None
    };
    let all = comps.iter().all(|c| c.recognition.is_recognized());
    let outcome = if all {
        Outcome::Recognized
    } else {
        Outcome::UnrecognizedAtPrecision
    };
    Ok((first, comps, power, outcome))
}

/// Probes a single value at its own precision.
pub fn monomial_recognize(w: &ExtScalar, guard: i64) -> Result<MonomialCertificate> {
    let p = w.min_prec();
    let (value, components, power, outcome) =
        monomial_recognize_with(&[p], guard, |_| Ok(w.clone()))?;
    Ok(MonomialCertificate {
        label: "monomial".into(),
        factors: vec![],
        pi_exponent: 0,
        value,
        components,
        power,
        outcome,
        precisions: vec![p],
    })
}

/// `∏ Γ(x_i)^{e_i} · π̃^{-k}` at absolute precision about `prec`.
fn gamma_monomial(
    ctx: &Context,
    factors: &[(RationalFunction, i64)],
    pi_exp: i64,
    prec: i64,
) -> Result<ExtScalar> {
    let work = prec + 4;
    let mut acc = PrecSeries::one(&ctx.fq);
    for (x, e) in factors {
        let g = gamma_eval(ctx, x, work + 4)?.value;
        acc = acc.mul(&g.powi(*e)?);
    }
    let mut w = ExtScalar::from_series(acc);
    if pi_exp != 0 {
        let pi = pi_tilde(&ctx.cache, work + 4 + pi_exp.abs() * 2);
        let pk = pi.pow(pi_exp.unsigned_abs());
        w = if pi_exp > 0 { w.div(&pk)? } else { w.mul(&pk) };
    }
    Ok(w)
}

/// Recognizes `∏ Γ(x_i)^{e_i} / π̃^{pi_exp}` in `k(θ̃)` at `P` and `P + 20`.
pub fn gamma_monomial_check(
    ctx: &Context,
    label: &str,
    factors: Vec<(RationalFunction, i64)>,
    pi_exp: i64,
) -> Result<MonomialCertificate> {
    let p = ctx.cfg.prec;
    let precs = [p, p + 20];
    let (value, components, power, outcome) =
        monomial_recognize_with(&precs, ctx.cfg.guard, |pp| {
            gamma_monomial(ctx, &factors, pi_exp, pp)
        })?;
    Ok(MonomialCertificate {
        label: label.into(),
        factors: factors.iter().map(|(x, e)| (x.to_string(), *e)).collect(),
        pi_exponent: pi_exp,
        value,
        components,
        power,
        outcome,
        precisions: precs.to_vec(),
    })
}

fn require_non_integral(r: &RationalFunction) -> Result<()> {
    if r.is_polynomial() {
        return Err(Error::Invalid(format!("argument {r} must lie in k \\ A")));
    }
    Ok(())
}

/// `Γ(r + a)/Γ(r)`.
pub fn translation_check(
    ctx: &Context,
    r: &RationalFunction,
    a: &Poly,
) -> Result<MonomialCertificate> {
    require_non_integral(r)?;
    let ra = r.add(&RationalFunction::new(
        a.clone(),
        Poly::one(&ctx.fq, Var::Theta),
    )?);
    gamma_monomial_check(ctx, "translation", vec![(ra, 1), (r.clone(), -1)], 0)
}

/// `∏_{ξ ∈ F_q^×} Γ(ξ r) / π̃`.
pub fn reflection_check(ctx: &Context, r: &RationalFunction) -> Result<MonomialCertificate> {
    require_non_integral(r)?;
    let factors = ctx
        .fq
        .nonzero_elements()
        .map(|xi| (r.scale(xi), 1))
        .collect();
    gamma_monomial_check(ctx, "reflection", factors, 1)
}

/// `∏_{a ∈ A/g} Γ((r + a)/g) / (π̃^{(q^d-1)/(q-1)} Γ(r))`, `d = deg g`.
pub fn gauss_mult_check(
    ctx: &Context,
    r: &RationalFunction,
    g: &Poly,
) -> Result<MonomialCertificate> {
    require_non_integral(r)?;
    if !g.is_monic() || g.is_constant() {
        return Err(Error::Invalid(format!(
            "multiplier must be monic of positive degree, got {g}"
        )));
    }
    let d = g.deg_i64() as usize;
    let q = ctx.fq.q() as i64;
    let count =
        monic_count(ctx.fq.q(), d).ok_or_else(|| Error::Budget("too many residues".into()))?;
    let gr = RationalFunction::new(g.clone(), Poly::one(&ctx.fq, Var::Theta))?;
    let mut factors: Vec<(RationalFunction, i64)> = (0..count)
        .map(|k| {
            let a = RationalFunction::new(
                nth_residue(&ctx.fq, k, Var::Theta),
                Poly::one(&ctx.fq, Var::Theta),
            )?;
            Ok((r.add(&a).div(&gr)?, 1))
        })
        .collect::<Result<_>>()?;
    factors.push((r.clone(), -1));
    let pi_exp = (q.pow(d as u32) - 1) / (q - 1);
    gamma_monomial_check(ctx, "gauss", factors, pi_exp)
}

/// `1 + (q-2)/(q-1) · #(A/f)^×`.
pub fn gamma_trdeg(f: &Poly, seed: u64) -> Result<u64> {
    let q = f.field().q() as u64;
    let phi = euler_phi_a(f, seed)?;
    assert_eq!(phi % (q - 1), 0, "(q-1) divides #(A/f)^×");
    Ok(1 + (q - 2) * phi / (q - 1))
}

/// `1 + (q-2)/(q-1)·#(A/f)^× + s - ⌊s/p⌋ - ⌊s/(q-1)⌋ + ⌊s/(p(q-1))⌋`.
pub fn joint_trdeg(f: &Poly, s: u64, seed: u64) -> Result<u64> {
    let q = f.field().q() as u64;
    let p = f.field().p() as u64;
    let phi = euler_phi_a(f, seed)?;
    assert_eq!(phi % (q - 1), 0, "(q-1) divides #(A/f)^×");
    Ok(1 + (q - 2) * phi / (q - 1) + s + s / (p * (q - 1)) - s / p - s / (q - 1))
}

/// `gamma_trdeg(f) + zeta_trdeg(s) - 1`, the additive prediction.
pub fn joint_trdeg_additive(f: &Poly, s: u64, seed: u64) -> Result<u64> {
    let fq = f.field();
    Ok(gamma_trdeg(f, seed)? + zeta_trdeg(fq.p() as u64, fq.q() as u64, s) - 1)
}

pub(crate) type GateCell = OnceLock<BlockGateReport>;

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

    fn rf(fq: &Fq, num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(
            Poly::from_ints(fq, Var::Theta, num),
            Poly::from_ints(fq, Var::Theta, den),
        )
        .unwrap()
    }

    #[test]
    fn closed_form_coefficients_match_table() {
        let c = ctx(3, 60);
        for d in 0..=3 {
            for r in gate_arguments(&c.fq) {
                let fast = ed_over_dd(&c.cache, d, &r, 60).unwrap();
                let beta = c.cache.beta(d, 400);
                let rs = PrecSeries::from_rational(&r, 400);
                let slow = beta
                    .iter()
                    .enumerate()
                    .fold(PrecSeries::exact_zero(&c.fq), |acc, (i, b)| {
                        acc.add(&b.mul(&rs.frobenius(i as u32, Some(400))))
                    });
                assert!(fast.agrees_with(&slow, 0), "d={d} r={r}");
            }
        }
    }

    #[test]
    fn gates_pass() {
        for q in [2u64, 3] {
            let c = ctx(q, 40);
            let g = gamma_gate(&c.cache);
            assert!(g.passed, "{g:?}");
        }
    }

    #[test]
    fn poles_and_polynomial_values() {
        let c = ctx(3, 40);
        let zero = RationalFunction::zero(&c.fq, Var::Theta);
        assert!(matches!(gamma_eval(&c, &zero, 20), Err(Error::Pole(_))));
        // -(θ+1) has monic negative
        let r = rf(&c.fq, &[2, 2], &[1]);
        assert!(matches!(gamma_eval(&c, &r, 20), Err(Error::Pole(_))));
        // Γ(θ) is a finite product
        let th = rf(&c.fq, &[0, 1], &[1]);
        let g = gamma_eval(&c, &th, 40).unwrap();
        assert!(g.value.prec() >= 40);
    }

    #[test]
    fn brackets_small() {
        let fq = Fq::new(3, 1).unwrap();
        let x = rf(&fq, &[1], &[0, 1]);
        assert_eq!(bracket_n(&x, 0), 1);
        assert_eq!(bracket(&x), 1);
        assert_eq!(bracket_literal(&x), 1);
        let x2 = rf(&fq, &[2], &[0, 1]);
        assert_eq!(bracket(&x2), 0);
        assert_eq!(bracket_literal(&x2), 0);
        let a = rf(&fq, &[1, 1], &[1]);
        assert_eq!(bracket(&a), 0);
    }

    #[test]
    fn divisor_algebra() {
        let fq = Fq::new(3, 1).unwrap();
        let f = Poly::from_ints(&fq, Var::Theta, &[1, 0, 1]);
        let one = Poly::one(&fq, Var::Theta);
        let d = GammaDivisor::unit(&f, &one).unwrap();
        assert_eq!(d.weight(), Ratio::new(1, 2));
        assert_eq!(
            GammaDivisor::unit(&f, &Poly::zero(&fq, Var::Theta))
                .unwrap()
                .weight(),
            Ratio::from_integer(0)
        );
        assert_eq!(d.star(&one).unwrap(), d);
        let th = Poly::x(&fq, Var::Theta);
        assert!(d.star(&f).is_err());
        let back = GammaDivisor::from_json(&fq, &d.star(&th).unwrap().to_json()).unwrap();
        assert_eq!(back, d.star(&th).unwrap());
    }

    #[test]
    fn counts() {
        let f3 = Fq::new(3, 1).unwrap();
        let th = Poly::x(&f3, Var::Theta);
        assert_eq!(gamma_trdeg(&th, 0).unwrap(), 2);
        assert_eq!(joint_trdeg(&th, 4, 0).unwrap(), 3);
        let f2 = Fq::new(2, 1).unwrap();
        assert_eq!(gamma_trdeg(&Poly::x(&f2, Var::Theta), 0).unwrap(), 1);
    }
}
