//! Frobenius difference equations `Ψ^{(-1)} = ΦΨ` over truncated `t`-series.
//!
//! `Φ` has exact entries in `k̄[t]` (tower scalars, so `θ^{1/q}` is available)
//! and `Ψ` has entries in `K_∞[[t]] mod t^T`. Every identity is checked in the
//! positive-twist form `Ψ = Φ^{(1)}Ψ^{(1)}`, which only needs `q`-th powers.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ext::ExtScalar;
use crate::fq::{Fe, Fq};
use crate::par;
use crate::series::{padd, PrecSeries, Valuation, EXACT};
use crate::tower::{Level, TowerScalar};
use crate::zeta::AtCertificate;

/// Polynomial in `t` with exact tower-scalar coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TPoly {
    fq: Fq,
    coeffs: Vec<TowerScalar>,
}

impl TPoly {
    pub fn from_coeffs(fq: &Fq, mut coeffs: Vec<TowerScalar>) -> Self {
        while coeffs.last().is_some_and(TowerScalar::is_zero) {
            coeffs.pop();
        }
        TPoly {
            fq: fq.clone(),
            coeffs,
        }
    }

    pub fn zero(fq: &Fq) -> Self {
        Self::from_coeffs(fq, Vec::new())
    }

    pub fn constant(c: TowerScalar) -> Self {
        let fq = c.field().clone();
        Self::from_coeffs(&fq, vec![c])
    }

    pub fn one(fq: &Fq) -> Self {
        Self::constant(TowerScalar::one(fq, Level::Zero))
    }

    /// `t - θ`.
    pub fn t_minus_theta(fq: &Fq) -> Self {
        Self::from_coeffs(
            fq,
            vec![
                TowerScalar::theta(fq, Level::Zero).neg(),
                TowerScalar::one(fq, Level::Zero),
            ],
        )
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }
    pub fn coeffs(&self) -> &[TowerScalar] {
        &self.coeffs
    }
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = TowerScalar::zero(&self.fq, Level::Zero);
        let c = (0..n)
            .map(|i| {
                self.coeffs
                    .get(i)
                    .unwrap_or(&zero)
                    .add(o.coeffs.get(i).unwrap_or(&zero))
            })
            .collect();
        Self::from_coeffs(&self.fq, c)
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(&self.fq, self.coeffs.iter().map(TowerScalar::neg).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &TowerScalar) -> Self {
        Self::from_coeffs(&self.fq, self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.fq);
        }
        let mut c =
            vec![TowerScalar::zero(&self.fq, Level::Zero); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(&self.fq, c)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(&self.fq), |acc, _| acc.mul(self))
    }

    /// Coefficientwise `q^k`-th power; `t` is fixed.
    pub fn twist(&self, k: u32) -> Self {
        Self::from_coeffs(
            &self.fq,
            self.coeffs.iter().map(|c| c.frobenius(k)).collect(),
        )
    }

    /// Division by `t - θ`: quotient and remainder.
    pub fn div_t_minus_theta(&self) -> (Self, TowerScalar) {
        let theta = TowerScalar::theta(&self.fq, Level::Zero);
        let Some(d) = self.degree() else {
            return (
                Self::zero(&self.fq),
                TowerScalar::zero(&self.fq, Level::Zero),
            );
        };
        let mut quo = vec![TowerScalar::zero(&self.fq, Level::Zero); d];
        let mut carry = TowerScalar::zero(&self.fq, Level::Zero);
        for i in (0..=d).rev() {
            let v = self.coeffs[i].add(&carry.mul(&theta));
            if i == 0 {
                return (Self::from_coeffs(&self.fq, quo), v);
            }
            quo[i - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// Expansion as a truncated series; all coefficients must lie in `k(θ̃)`.
    pub fn to_series(&self, t_order: usize) -> Result<TSeriesTrunc> {
        let mut out = TSeriesTrunc::zero(&self.fq, t_order);
        for (i, c) in self.coeffs.iter().enumerate().take(t_order) {
            out.coeffs[i] = ExtScalar::from_tower(c, EXACT)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(TowerScalar::to_json).collect())
    }
}

/// `Σ_{j<T} c_j t^j` with precision-tracked coefficients in `K_∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TSeriesTrunc {
    fq: Fq,
    coeffs: Vec<ExtScalar>,
}

fn exactly_zero(x: &ExtScalar) -> bool {
    x.components().iter().all(|c| c.is_zero() && c.is_exact())
}

impl TSeriesTrunc {
    pub fn from_coeffs(fq: &Fq, mut coeffs: Vec<ExtScalar>, t_order: usize) -> Self {
        coeffs.resize(t_order, ExtScalar::zero(fq, EXACT));
        TSeriesTrunc {
            fq: fq.clone(),
            coeffs,
        }
    }

    pub fn zero(fq: &Fq, t_order: usize) -> Self {
        Self::from_coeffs(fq, Vec::new(), t_order)
    }

    pub fn constant(x: ExtScalar, t_order: usize) -> Self {
        let fq = x.field().clone();
        Self::from_coeffs(&fq, vec![x], t_order)
    }

    pub fn one(fq: &Fq, t_order: usize) -> Self {
        Self::constant(ExtScalar::one(fq), t_order)
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }
    pub fn t_order(&self) -> usize {
        self.coeffs.len()
    }
    pub fn coeffs(&self) -> &[ExtScalar] {
        &self.coeffs
    }
    pub fn coeff(&self, j: usize) -> &ExtScalar {
        &self.coeffs[j]
    }

    /// Copy with coefficient `j` replaced.
    pub fn with_coeff(&self, j: usize, x: ExtScalar) -> Self {
        let mut out = self.clone();
        out.coeffs[j] = x;
        out
    }

    fn zip(&self, o: &Self, f: impl Fn(&ExtScalar, &ExtScalar) -> ExtScalar) -> Self {
        assert_eq!(self.t_order(), o.t_order(), "truncation orders differ");
        TSeriesTrunc {
            fq: self.fq.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    fn map(&self, f: impl Fn(&ExtScalar) -> ExtScalar) -> Self {
        TSeriesTrunc {
            fq: self.fq.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, ExtScalar::add)
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, ExtScalar::sub)
    }
    pub fn neg(&self) -> Self {
        self.map(ExtScalar::neg)
    }
    pub fn scale(&self, x: &ExtScalar) -> Self {
        self.map(|c| c.mul(x))
    }
    /// Truncates every coefficient to absolute precision `prec`.
    pub fn truncate_prec(&self, prec: i64) -> Self {
        self.map(|c| c.truncate(prec))
    }

    /// Product mod `t^T`.
    pub fn mul(&self, o: &Self) -> Self {
        let t = self.t_order();
        assert_eq!(t, o.t_order(), "truncation orders differ");
        let nz: Vec<usize> = (0..t).filter(|&j| !exactly_zero(&o.coeffs[j])).collect();
        let coeffs = par::map_range(t, |k| {
            let mut acc = ExtScalar::zero(&self.fq, EXACT);
            for &j in nz.iter().take_while(|&&j| j <= k) {
                let a = &self.coeffs[k - j];
                if !exactly_zero(a) {
                    acc = acc.add(&a.mul(&o.coeffs[j]));
                }
            }
            acc
        });
        TSeriesTrunc {
            fq: self.fq.clone(),
            coeffs,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(&self.fq, self.t_order()), |acc, _| acc.mul(self))
    }

    /// Coefficientwise `q^k`-th power; `cap` bounds the resulting precisions.
    pub fn twist(&self, k: u32, cap: Option<i64>) -> Self {
        self.map(|c| c.frobenius(k, cap))
    }

    /// Smallest coefficient precision.
    pub fn min_prec(&self) -> i64 {
        self.coeffs
            .iter()
            .map(ExtScalar::min_prec)
            .min()
            .unwrap_or(EXACT)
    }

    /// Lower bound for the component valuations of all coefficients.
    pub fn valuation(&self) -> Valuation {
        min_valuation(self.coeffs.iter().map(ExtScalar::component_valuation))
    }

    /// `Σ_{j<T} c_j θ^j`, guarded by an empirical decay test on the last
    /// coefficients. The value is truncated to `prec` or to the estimated
    /// tail size, whichever is smaller.
    pub fn evaluate_at_theta(&self, prec: i64) -> Result<ThetaValue> {
        let t = self.t_order();
        let weight = |j: usize| -> Option<i64> {
            let c = &self.coeffs[j];
            let shifted_prec = c.min_prec().saturating_sub(j as i64);
            if c.is_zero() {
                return (shifted_prec < prec).then_some(shifted_prec);
            }
            Some(c.component_valuation().lower() - j as i64)
        };
        // negligible coefficients weigh EXACT; sporadic cancellation produces
        // upward outliers, so only the strict suffix minima have to form a
        // rising sequence of at least two points
        let tail: Vec<i64> = (t.saturating_sub(5)..t)
            .map(|j| weight(j).unwrap_or(EXACT))
            .collect();
        let finite = tail.iter().filter(|&&w| w < EXACT).count();
        let mut later = EXACT;
        let mut minima = 0;
        for &w in tail.iter().rev() {
            if w < later {
                minima += 1;
                later = w;
            }
        }
        if finite > 1 && minima < 2 {
            return Err(Error::Precision(format!(
                "coefficients of the t-series do not decay fast enough to evaluate at t = θ \
                 (val(c_j) - j over the last terms: {tail:?})"
            )));
        }
        let tail_bound = match tail.last() {
            Some(&w) if w < EXACT => w + 1,
            _ => EXACT,
        };
        let target = prec.min(tail_bound);
        let value = self
            .coeffs
            .iter()
            .enumerate()
            .fold(ExtScalar::zero(&self.fq, EXACT), |acc, (j, c)| {
                acc.add(&c.shift(j as i64))
            })
            .truncate(target);
        Ok(ThetaValue {
            value,
            tail_certified: tail_bound >= prec,
            tail_bound,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "t_order": self.t_order(),
            "coeffs": self.coeffs.iter().map(ExtScalar::to_json).collect::<Vec<_>>(),
        })
    }
}

fn min_valuation(vals: impl Iterator<Item = Valuation>) -> Valuation {
    vals.fold(Valuation::AtLeast(EXACT), |best, v| {
        if v.lower() < best.lower() || (v.lower() == best.lower() && v.is_exact()) {
            v
        } else {
            best
        }
    })
}

/// The value of a truncated series at `t = θ`.
#[derive(Clone, Debug)]
pub struct ThetaValue {
    pub value: ExtScalar,
    /// Whether the estimated tail lies beyond the requested precision.
    pub tail_certified: bool,
    pub tail_bound: i64,
}

/// `Ω = θ̃^{-q} ∏_{i>=1} (1 - t/θ^{q^i})` mod `t^T`, coefficients to precision `prec`.
pub fn omega_trunc(fq: &Fq, t_order: usize, prec: i64) -> TSeriesTrunc {
    let q = fq.q() as i64;
    let mut prod = TSeriesTrunc::one(fq, t_order);
    let mut qi = q;
    while qi < prec {
        let factor = TSeriesTrunc::from_coeffs(
            fq,
            vec![
                ExtScalar::one(fq),
                ExtScalar::from_series(PrecSeries::monomial(fq, fq.neg(Fe::ONE), qi, EXACT)),
            ],
            t_order,
        );
        prod = prod.mul(&factor);
        qi = match qi.checked_mul(q) {
            Some(v) => v,
            None => break,
        };
    }
    prod.truncate_prec(prec)
        .scale(&ExtScalar::theta_tilde_pow(fq, -q))
}

/// `(t - θ^{q^i})^{-1} = -Σ_k t^k θ^{-q^i (k+1)}`, exact coefficients.
fn inv_t_minus_theta_qi(fq: &Fq, qi: i64, t_order: usize) -> TSeriesTrunc {
    let coeffs = (0..t_order)
        .map(|k| {
            let v = qi.checked_mul(k as i64 + 1).filter(|&v| v < EXACT / 2);
            match v {
                Some(v) => {
                    ExtScalar::from_series(PrecSeries::monomial(fq, fq.neg(Fe::ONE), v, EXACT))
                }
                None => ExtScalar::zero(fq, EXACT),
            }
        })
        .collect();
    TSeriesTrunc::from_coeffs(fq, coeffs, t_order)
}

/// `L_{α,n} = α + Σ_{i>=1} α^{q^i} / ∏_{j=1}^{i} (t - θ^{q^j})^n` mod `t^T`,
/// coefficients to precision `prec`. Requires `|α| < q^{nq/(q-1)}`.
pub fn l_series(alpha: &TowerScalar, n: u32, t_order: usize, prec: i64) -> Result<TSeriesTrunc> {
    let fq = alpha.field().clone();
    if n == 0 {
        return Err(Error::Invalid("L-series index must be positive".into()));
    }
    if alpha.is_zero() {
        return Ok(TSeriesTrunc::zero(&fq, t_order));
    }
    let q = fq.q() as i64;
    let n = n as i64;
    let a = ExtScalar::from_tower(alpha, prec + 64)?;
    // valuations below are scaled by q-1
    let sv = match a.scaled_valuation() {
        Valuation::Exact(v) => v,
        Valuation::AtLeast(v) => v,
    };
    if sv <= -n * q {
        return Err(Error::OutOfDisk(format!(
            "L-series needs |α| < q^({n}q/(q-1)); α = {alpha} has scaled valuation {sv}/(q-1)"
        )));
    }
    let mut sum = TSeriesTrunc::constant(a.truncate(prec), t_order);
    let mut partial = TSeriesTrunc::one(&fq, t_order);
    let mut qi: i64 = 1;
    for i in 1u32.. {
        qi = qi
            .checked_mul(q)
            .ok_or_else(|| Error::Precision("L-series exponent overflow".into()))?;
        let lower = qi * sv + n * (qi * q - q);
        if lower >= (q - 1) * prec {
            break;
        }
        let lift = (-(qi * sv)).max(0);
        let work = prec + (lift + q - 2) / (q - 1);
        let inv = inv_t_minus_theta_qi(&fq, qi, t_order).pow(n as u32);
        partial = partial.mul(&inv).truncate_prec(work);
        let term = partial.scale(&a.frobenius(i, Some(work)));
        sum = sum.add(&term.truncate_prec(prec));
    }
    Ok(sum.truncate_prec(prec))
}

/// Outcome of checking `Ψ - Φ^{(1)}Ψ^{(1)} ≡ 0 mod t^T` to a valuation threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrivializationCertificate {
    pub size: usize,
    pub t_order: usize,
    pub threshold: i64,
    pub residual: Valuation,
    /// Entry `(row, column, t-degree)` with the smallest residual valuation.
    pub worst: Option<(usize, usize, usize)>,
    pub passed: bool,
}

impl TrivializationCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "size": self.size,
            "t_order": self.t_order,
            "threshold": self.threshold,
            "residual_valuation": self.residual.to_json(),
            "worst_entry": self.worst,
            "passed": self.passed,
        })
    }
}

/// Checks `Ψ^{(-1)} = ΦΨ` in the form `Ψ = Φ^{(1)}Ψ^{(1)}`.
pub fn verify_trivialization(
    phi: &[Vec<TPoly>],
    psi: &[Vec<TSeriesTrunc>],
    threshold: i64,
) -> Result<TrivializationCertificate> {
    let r = phi.len();
    if r == 0
        || psi.len() != r
        || phi.iter().any(|row| row.len() != r)
        || psi.iter().any(|row| row.len() != r)
    {
        return Err(Error::Invalid(
            "Φ and Ψ must be square matrices of the same size".into(),
        ));
    }
    let t_order = psi[0][0].t_order();
    if psi.iter().flatten().any(|e| e.t_order() != t_order) {
        return Err(Error::Invalid(
            "Ψ entries have different truncation orders".into(),
        ));
    }
    let fq = psi[0][0].field().clone();
    let phi1: Vec<Vec<Option<TSeriesTrunc>>> = phi
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    if e.is_zero() {
                        Ok(None)
                    } else {
                        e.twist(1).to_series(t_order).map(Some)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    // Φ^{(1)} has poles of bounded order at ∞; raise Ψ^{(1)} precision by that much
    let loss = phi1
        .iter()
        .flatten()
        .flatten()
        .map(|e| -e.valuation().lower())
        .max()
        .unwrap_or(0)
        .max(0);
    let cap = padd(threshold, loss + 1);
    let psi1: Vec<Vec<TSeriesTrunc>> = psi
        .iter()
        .map(|row| row.iter().map(|e| e.twist(1, Some(cap))).collect())
        .collect();
    let entries = par::map_range(r * r, |idx| {
        let (i, j) = (idx / r, idx % r);
        let mut rhs = TSeriesTrunc::zero(&fq, t_order);
        for (k, f) in phi1[i].iter().enumerate() {
            if let Some(f) = f {
                rhs = rhs.add(&f.mul(&psi1[k][j]));
            }
        }
        psi[i][j].sub(&rhs)
    });
    let mut residual = Valuation::AtLeast(EXACT);
    let mut worst = None;
    for (idx, e) in entries.iter().enumerate() {
        for (k, c) in e.coeffs().iter().enumerate() {
            let v = c.component_valuation();
            if v.lower() < residual.lower() {
                residual = v;
                worst = Some((idx / r, idx % r, k));
            }
        }
    }
    Ok(TrivializationCertificate {
        size: r,
        t_order,
        threshold,
        residual,
        worst,
        passed: residual.certainly_ge(threshold),
    })
}

/// `det Φ = c (t - θ)^s` with `c` a nonzero constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetShape {
    pub exponent: u32,
    pub constant: TowerScalar,
}

/// Symbolic determinant-shape check for triangular `Φ`.
pub fn det_shape(phi: &[Vec<TPoly>]) -> Result<DetShape> {
    let r = phi.len();
    let fq = phi
        .first()
        .and_then(|row| row.first())
        .map(|e| e.field().clone())
        .ok_or_else(|| Error::Invalid("empty Φ".into()))?;
    let lower = (0..r).all(|i| (i + 1..r).all(|j| phi[i][j].is_zero()));
    let upper = (0..r).all(|i| (0..i).all(|j| phi[i][j].is_zero()));
    if !lower && !upper {
        return Err(Error::Invalid(
            "determinant shape check supports triangular Φ only".into(),
        ));
    }
    let mut det = (0..r).fold(TPoly::one(&fq), |acc, i| acc.mul(&phi[i][i]));
    if det.is_zero() {
        return Err(Error::Invalid("det Φ = 0".into()));
    }
    let mut exponent = 0;
    loop {
        let (quo, rem) = det.div_t_minus_theta();
        if !rem.is_zero() || quo.is_zero() {
            break;
        }
        det = quo;
        exponent += 1;
    }
    if det.degree() != Some(0) {
        return Err(Error::Invalid(format!(
            "det Φ is not of the form c(t-θ)^s (cofactor has degree {:?})",
            det.degree()
        )));
    }
    Ok(DetShape {
        exponent,
        constant: det.coeffs[0].clone(),
    })
}

/// A pair `(Φ, Ψ)` that has passed verification and the determinant-shape check.
#[derive(Clone, Debug)]
pub struct MotiveSystem {
    pub label: String,
    pub phi: Vec<Vec<TPoly>>,
    pub psi: Vec<Vec<TSeriesTrunc>>,
    pub prec: i64,
    pub det: DetShape,
    pub certificate: TrivializationCertificate,
}

impl MotiveSystem {
    /// Verifies at `threshold` and checks `det Φ = c(t-θ)^s`.
    pub fn new(
        label: String,
        phi: Vec<Vec<TPoly>>,
        psi: Vec<Vec<TSeriesTrunc>>,
        prec: i64,
        threshold: i64,
    ) -> Result<Self> {
        let det = det_shape(&phi)?;
        let certificate = verify_trivialization(&phi, &psi, threshold)?;
        if !certificate.passed {
            return Err(Error::Precision(format!(
                "{label}: Ψ - Φ^(1)Ψ^(1) has valuation {} below threshold {threshold}",
                certificate.residual
            )));
        }
        Ok(MotiveSystem {
            label,
            phi,
            psi,
            prec,
            det,
            certificate,
        })
    }

    pub fn size(&self) -> usize {
        self.phi.len()
    }

    pub fn t_order(&self) -> usize {
        self.psi[0][0].t_order()
    }

    pub fn to_json(&self, include_psi: bool) -> Value {
        let mut v = json!({
            "label": self.label,
            "size": self.size(),
            "t_order": self.t_order(),
            "precision": self.prec,
            "phi": self.phi.iter().map(|row| row.iter().map(TPoly::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "det_exponent": self.det.exponent,
            "det_constant": self.det.constant.to_json(),
            "verification": self.certificate.to_json(),
        });
        if include_psi {
            v["psi"] = self
                .psi
                .iter()
                .map(|row| row.iter().map(TSeriesTrunc::to_json).collect::<Vec<_>>())
                .collect();
        }
        v
    }
}

/// `((t-θ)^n, Ω^n)`, the difference equation of the `n`-th tensor power of the Carlitz module.
pub fn build_carlitz_power(
    fq: &Fq,
    n: u32,
    t_order: usize,
    prec: i64,
    threshold: i64,
) -> Result<MotiveSystem> {
    let work = prec + t_order as i64;
    let phi = vec![vec![TPoly::t_minus_theta(fq).pow(n)]];
    let psi = vec![vec![omega_trunc(fq, t_order, work).pow(n)]];
    MotiveSystem::new(format!("C^⊗{n}"), phi, psi, prec, threshold)
}

pub type PhiMatrix = Vec<Vec<TPoly>>;
pub type PsiMatrix = Vec<Vec<TSeriesTrunc>>;

/// The lower-triangular pair with first columns `(t-θ)^n, θ^{i_k/q}(t-θ)^n`
/// and `Ω^n, L_{θ^{i_k},n}Ω^n` for the given exponents `i_k`, unverified.
pub fn polylog_matrices(
    fq: &Fq,
    n: u32,
    exponents: &[usize],
    t_order: usize,
    prec: i64,
) -> Result<(PhiMatrix, PsiMatrix)> {
    let r = exponents.len() + 1;
    let max_exp = exponents.iter().copied().max().unwrap_or(0) as i64;
    let work = prec + t_order as i64;
    let tn = TPoly::t_minus_theta(fq).pow(n);
    let omega_n = omega_trunc(fq, t_order, work + max_exp).pow(n);
    let u = TowerScalar::u(fq);
    let mut phi = vec![vec![TPoly::zero(fq); r]; r];
    let mut psi = vec![vec![TSeriesTrunc::zero(fq, t_order); r]; r];
    phi[0][0] = tn.clone();
    psi[0][0] = omega_n.clone();
    let rows: Vec<Result<TSeriesTrunc>> = par::map_slice(exponents, |&e| {
        let alpha = TowerScalar::theta(fq, Level::Zero).pow(e as u64);
        Ok(l_series(&alpha, n, t_order, work)?
            .mul(&omega_n)
            .truncate_prec(work))
    });
    for (k, (&e, row)) in exponents.iter().zip(rows).enumerate() {
        phi[k + 1][0] = tn.scale(&u.pow(e as u64));
        phi[k + 1][k + 1] = TPoly::one(fq);
        psi[k + 1][0] = row?;
        psi[k + 1][k + 1] = TSeriesTrunc::one(fq, t_order);
    }
    Ok((phi, psi))
}

/// [`polylog_matrices`] as a verified system.
pub fn build_polylog_motive(
    fq: &Fq,
    n: u32,
    exponents: &[usize],
    t_order: usize,
    prec: i64,
    threshold: i64,
) -> Result<MotiveSystem> {
    let (phi, psi) = polylog_matrices(fq, n, exponents, t_order, prec)?;
    MotiveSystem::new(
        format!("polylog(n={n}, exponents={exponents:?})"),
        phi,
        psi,
        prec,
        threshold,
    )
}

/// The `ζ(n)` system built from the basis `ι` of an Anderson–Thakur certificate.
pub fn build_zeta_motive(
    fq: &Fq,
    cert: &AtCertificate,
    t_order: usize,
    prec: i64,
    threshold: i64,
) -> Result<MotiveSystem> {
    let n =
        u32::try_from(cert.n).map_err(|_| Error::Invalid(format!("index {} too large", cert.n)))?;
    let mut sys = build_polylog_motive(fq, n, &cert.iota, t_order, prec, threshold)?;
    sys.label = format!("zeta(n={}, iota={:?})", cert.n, cert.iota);
    if sys.det.exponent != n {
        return Err(Error::Invalid(format!(
            "det Φ_{n} has exponent {} instead of {n}",
            sys.det.exponent
        )));
    }
    Ok(sys)
}

/// Block-diagonal sum; verification is repeated on the assembled system.
pub fn build_direct_sum(systems: &[MotiveSystem]) -> Result<MotiveSystem> {
    let first = systems
        .first()
        .ok_or_else(|| Error::Invalid("direct sum of no systems".into()))?;
    let fq = first.phi[0][0].field().clone();
    let t_order = first.t_order();
    if systems.iter().any(|s| s.t_order() != t_order) {
        return Err(Error::Invalid(
            "blocks have different truncation orders".into(),
        ));
    }
    let r: usize = systems.iter().map(MotiveSystem::size).sum();
    let mut phi = vec![vec![TPoly::zero(&fq); r]; r];
    let mut psi = vec![vec![TSeriesTrunc::zero(&fq, t_order); r]; r];
    let mut off = 0;
    for s in systems {
        for i in 0..s.size() {
            for j in 0..s.size() {
                phi[off + i][off + j] = s.phi[i][j].clone();
                psi[off + i][off + j] = s.psi[i][j].clone();
            }
        }
        off += s.size();
    }
    let prec = systems.iter().map(|s| s.prec).min().unwrap_or(first.prec);
    let threshold = systems
        .iter()
        .map(|s| s.certificate.threshold)
        .min()
        .unwrap_or(first.certificate.threshold);
    let label = format!(
        "⊕[{}]",
        systems
            .iter()
            .map(|s| s.label.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    );
    MotiveSystem::new(label, phi, psi, prec, threshold)
}
