//! Factorization over `F_q`: squarefree split, distinct-degree, then
//! randomized equal-degree splitting (Cantor–Zassenhaus) seeded for
//! reproducibility. Also `#(A/f)^×`, divisor lists and monic enumeration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fq::{Fe, Fq};
use crate::poly::{Poly, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Fe,
    /// Monic irreducible factors with multiplicities, sorted by `Poly`'s order.
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self, fq: &Fq, var: Var) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(fq, var, self.unit), |acc, (p, m)| {
                acc.mul(&p.pow(*m as u64))
            })
    }
}

/// Factors `f` into monic irreducibles. Deterministic for a given seed.
pub fn factor(f: &Poly, seed: u64) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::Invalid("cannot factor the zero polynomial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = f.leading();
    let mut factors = Vec::new();
    for (sqf, mult) in squarefree(&f.monic()) {
        for (g, d) in distinct_degree(&sqf) {
            for h in equal_degree(&g, d, &mut rng) {
                factors.push((h, mult));
            }
        }
    }
    factors.sort();
    // merge repeated factors (possible across squarefree layers only in theory)
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (p, m) in factors {
        match merged.last_mut() {
            Some((lp, lm)) if *lp == p => *lm += m,
            _ => merged.push((p, m)),
        }
    }
    Ok(Factorization {
        unit,
        factors: merged,
    })
}

/// Squarefree decomposition of a monic polynomial in characteristic `p`.
pub fn squarefree(f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    sqf_rec(f, 1, &mut out);
    out
}

fn sqf_rec(f: &Poly, scale: u32, out: &mut Vec<(Poly, u32)>) {
    if f.is_constant() {
        return;
    }
    let p = f.field().p();
    let df = f.derivative();
    let mut c = f.gcd(&df);
    let mut w = f.exact_div(&c).expect("gcd divides");
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.exact_div(&y).expect("gcd divides");
        if !z.is_one() {
            out.push((z, i * scale));
        }
        i += 1;
        w = y;
        c = c.exact_div(&w).expect("gcd divides");
    }
    if !c.is_one() {
        let root = c.pth_root().expect("remaining cofactor is a p-th power");
        sqf_rec(&root, scale * p, out);
    }
}

/// Splits a squarefree monic `f` into products of irreducibles of equal degree.
pub fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let fq = f.field();
    let x = Poly::x(fq, f.var());
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut xp = x.clone();
    let mut d = 0;
    while rest.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        xp = xp.powmod(fq.q() as u64, &rest);
        let g = rest.gcd(&xp.sub(&x));
        if !g.is_one() {
            rest = rest.exact_div(&g).expect("gcd divides");
            xp = xp.rem(&rest).expect("nonzero");
            out.push((g, d));
        }
    }
    if !rest.is_one() {
        let dr = rest.degree().unwrap();
        out.push((rest, dr));
    }
    out
}

fn random_poly(fq: &Fq, var: Var, deg_lt: usize, rng: &mut ChaCha8Rng) -> Poly {
    use rand::Rng;
    Poly::from_coeffs(
        fq,
        var,
        (0..deg_lt).map(|_| Fe(rng.gen_range(0..fq.q()))).collect(),
    )
}

/// Splits `f`, a product of distinct irreducibles of degree `d`, completely.
pub fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.degree().unwrap_or(0);
    if n == d || n == 0 {
        return if n == 0 { Vec::new() } else { vec![f.clone()] };
    }
    let fq = f.field();
    let q = fq.q() as u64;
    loop {
        let a = random_poly(fq, f.var(), n, rng);
        if a.is_constant() {
            continue;
        }
        let b = if q % 2 == 1 {
            // a^{(q^d - 1)/2} = (a^{1 + q + ... + q^{d-1}})^{(q-1)/2}
            let mut norm = Poly::one(fq, f.var());
            let mut cur = a.rem(f).unwrap();
            for _ in 0..d {
                norm = norm.mulmod(&cur, f);
                cur = cur.powmod(q, f);
            }
            norm.powmod((q - 1) / 2, f).sub(&Poly::one(fq, f.var()))
        } else {
            let k = fq.e() as usize * d;
            let mut acc = Poly::zero(fq, f.var());
            let mut cur = a.rem(f).unwrap();
            for _ in 0..k {
                acc = acc.add(&cur);
                cur = cur.mulmod(&cur, f);
            }
            acc
        };
        let g = f.gcd(&b);
        let dg = g.degree().unwrap_or(0);
        if dg > 0 && dg < n {
            let h = f.exact_div(&g).expect("gcd divides");
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h, d, rng));
            return out;
        }
    }
}

pub fn is_irreducible(f: &Poly) -> bool {
    match f.degree() {
        None | Some(0) => false,
        Some(_) => {
            let m = f.monic();
            let sq = squarefree(&m);
            sq.len() == 1 && sq[0].1 == 1 && {
                let dd = distinct_degree(&m);
                dd.len() == 1 && dd[0].1 == m.degree().unwrap()
            }
        }
    }
}

fn require_monic_nonconstant(f: &Poly) -> Result<()> {
    if !f.is_monic() || f.is_constant() {
        return Err(Error::Invalid(format!(
            "expected a monic non-constant polynomial, got {f}"
        )));
    }
    Ok(())
}

/// `#(A/f)^×` from the factorization of `f`.
pub fn euler_phi_a(f: &Poly, seed: u64) -> Result<u64> {
    require_monic_nonconstant(f)?;
    let q = f.field().q() as u64;
    let fac = factor(f, seed)?;
    Ok(fac.factors.iter().fold(1u64, |acc, (p, m)| {
        let qd = q.pow(p.degree().unwrap() as u32);
        acc * qd.pow(m - 1) * (qd - 1)
    }))
}

/// All monic divisors of `f`, sorted by `Poly`'s order (so `1` first, `f` last).
pub fn monic_divisors(f: &Poly, seed: u64) -> Result<Vec<Poly>> {
    let fac = factor(f, seed)?;
    let mut divs = vec![Poly::one(f.field(), f.var())];
    for (p, m) in &fac.factors {
        let mut next = Vec::new();
        for d in &divs {
            let mut cur = d.clone();
            next.push(cur.clone());
            for _ in 0..*m {
                cur = cur.mul(p);
                next.push(cur.clone());
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}

/// Lexicographic enumeration of the monic polynomials of degree `d`.
///
/// The `n`-th element has base-`q` digits of `n` as its low coefficients,
/// constant term least significant.
#[derive(Clone)]
pub struct MonicIter {
    fq: Fq,
    var: Var,
    d: usize,
    next: u64,
    total: u64,
}

impl MonicIter {
    pub fn len(&self) -> u64 {
        self.total
    }
    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

/// Count `q^d`, or `None` on overflow.
pub fn monic_count(q: u32, d: usize) -> Option<u64> {
    (q as u64).checked_pow(d as u32)
}

pub fn monic_iter(fq: &Fq, d: usize, budget: u64) -> Result<MonicIter> {
    let total = monic_count(fq.q(), d)
        .filter(|&t| t <= budget)
        .ok_or_else(|| {
            Error::Budget(format!(
                "{}^{} monic polynomials exceed budget {budget}",
                fq.q(),
                d
            ))
        })?;
    Ok(MonicIter {
        fq: fq.clone(),
        var: Var::Theta,
        d,
        next: 0,
        total,
    })
}

/// The `n`-th monic polynomial of degree `d` in the enumeration order.
pub fn nth_monic(fq: &Fq, d: usize, mut n: u64) -> Poly {
    let q = fq.q() as u64;
    let mut c = Vec::with_capacity(d + 1);
    for _ in 0..d {
        c.push(Fe((n % q) as u32));
        n /= q;
    }
    c.push(Fe::ONE);
    Poly::from_coeffs(fq, Var::Theta, c)
}

/// The `n`-th polynomial of degree `< d` (all residues mod a degree-`d` modulus).
pub fn nth_residue(fq: &Fq, mut n: u64, var: Var) -> Poly {
    let q = fq.q() as u64;
    let mut c = Vec::new();
    while n > 0 {
        c.push(Fe((n % q) as u32));
        n /= q;
    }
    Poly::from_coeffs(fq, var, c)
}

impl Iterator for MonicIter {
    type Item = Poly;
    fn next(&mut self) -> Option<Poly> {
        if self.next >= self.total {
            return None;
        }
        let p = nth_monic(&self.fq, self.d, self.next).with_var(self.var);
        self.next += 1;
        Some(p)
    }
}
