//! Finite fields `F_q`, `q = p^e`, with table-driven arithmetic.
//!
//! Elements are stored as their coordinate vector over `F_p` packed into a
//! base-`p` integer: `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`. The defining
//! modulus is the lexicographically smallest monic irreducible of degree `e`
//! over `F_p`, with coefficients compared from the constant term upwards.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Upper bound on the field order supported by the table representation.
pub const MAX_ORDER: u64 = 1 << 20;

/// An element of `F_q`, packed as a base-`p` integer of its coordinates.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2(q-1)`, so that log sums need no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

/// Descriptor of a finite field. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct Fq(Arc<Tables>);

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.e == other.0.e)
    }
}
impl Eq for Fq {}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Small dense polynomials over F_p, used only to pick the modulus and build tables.
mod fp_poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let inv_lc = inv(m[dm], p);
        while r.len() > dm {
            let top = r.len() - 1;
            let c = (r[top] as u64 * inv_lc as u64 % p as u64) as u32;
            let shift = top - dm;
            for (i, &mc) in m.iter().enumerate() {
                let sub = (c as u64 * mc as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut v: Vec<u32> = out.into_iter().map(|x| x as u32).collect();
        trim(&mut v);
        v
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(a: &[u32], mut k: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut base = rem(a, m, p);
        let mut acc = vec![1u32];
        while k > 0 {
            if k & 1 == 1 {
                acc = mulmod(&acc, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            k >>= 1;
        }
        acc
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut out = vec![0u32; n];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *o = (x + p - y) % p;
        }
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn inv(x: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = x as u64 % p as u64;
        let mut k = p as u64 - 2;
        while k > 0 {
            if k & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            k >>= 1;
        }
        r as u32
    }

    /// Irreducibility of a monic `m` of degree `e` over `F_p`: no factor of degree `<= e/2`.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let e = m.len() - 1;
        if e == 1 {
            return true;
        }
        let x = vec![0u32, 1];
        let mut xp = x.clone();
        for _ in 1..=e / 2 {
            xp = powmod(&xp, p as u64, m, p);
            let g = gcd(m, &sub(&xp, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

impl Fq {
    /// Builds `F_{p^e}`.
    pub fn new(p: u32, e: u32) -> Result<Fq> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::InvalidField(
                "extension degree must be positive".into(),
            ));
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| {
                Error::InvalidField(format!("{p}^{e} exceeds the supported order {MAX_ORDER}"))
            })? as u32;
        let modulus = Self::smallest_irreducible(p, e);
        let mut tables = Tables {
            p,
            e,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            neg: Vec::new(),
            add: None,
        };
        tables.build();
        Ok(Fq(Arc::new(tables)))
    }

    /// Builds `F_q` from its order, which must be a prime power.
    pub fn with_order(q: u64) -> Result<Fq> {
        if !(2..=MAX_ORDER).contains(&q) {
            return Err(Error::InvalidField(format!("unsupported field order {q}")));
        }
        let ps = prime_divisors(q);
        if ps.len() != 1 {
            return Err(Error::InvalidField(format!("{q} is not a prime power")));
        }
        let p = ps[0];
        let mut e = 0;
        let mut r = q;
        while r > 1 {
            r /= p;
            e += 1;
        }
        Fq::new(p as u32, e)
    }

    fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
        // Enumerate (c_0, ..., c_{e-1}) with c_0 as the most significant digit.
        let total = (p as u64).pow(e);
        for idx in 0..total {
            let mut digits = vec![0u32; e as usize];
            let mut r = idx;
            for k in (0..e as usize).rev() {
                digits[k] = (r % p as u64) as u32;
                r /= p as u64;
            }
            let mut m = digits;
            m.push(1);
            if fp_poly::is_irreducible(&m, p) {
                return m;
            }
        }
        unreachable!("an irreducible polynomial of every degree exists")
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn e(&self) -> u32 {
        self.0.e
    }
    pub fn q(&self) -> u32 {
        self.0.q
    }
    /// Coefficients of the defining modulus over `F_p`, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let t = &*self.0;
        if t.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        if t.e == 1 {
            let s = a.0 + b.0;
            return Fe(if s >= t.p { s - t.p } else { s });
        }
        if let Some(add) = &t.add {
            return Fe(add[(a.0 * t.q + b.0) as usize]);
        }
        Fe(t.add_digits(a.0, b.0))
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let t = &*self.0;
        if t.e == 1 {
            return Fe(((a.0 as u64 * b.0 as u64) % t.p as u64) as u32);
        }
        Fe(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            return None;
        }
        let t = &*self.0;
        let l = t.log[a.0 as usize];
        Some(Fe(t.exp[((t.q - 1 - l) % (t.q - 1)) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fe, k: u64) -> Fe {
        if k == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let t = &*self.0;
        let l = t.log[a.0 as usize] as u64;
        Fe(t.exp[((l * (k % (t.q as u64 - 1))) % (t.q as u64 - 1)) as usize])
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// The unique `y` with `y^p = a`.
    pub fn pth_root(&self, a: Fe) -> Fe {
        self.pow(a, self.0.q as u64 / self.0.p as u64)
    }

    /// A fixed generator of the multiplicative group.
    pub fn generator(&self) -> Fe {
        Fe(self.0.exp[1])
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.0.q).map(Fe)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fe> {
        (1..self.0.q).map(Fe)
    }

    /// Coordinates over `F_p`, constant term first.
    pub fn coords(&self, a: Fe) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.0.e as usize);
        let mut r = a.0;
        for _ in 0..self.0.e {
            out.push(r % self.0.p);
            r /= self.0.p;
        }
        out
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<Fe> {
        if coords.len() > self.0.e as usize || coords.iter().any(|&c| c >= self.0.p) {
            return Err(Error::Parse(format!(
                "invalid F_{} coordinates {coords:?}",
                self.0.q
            )));
        }
        let mut v = 0u32;
        for &c in coords.iter().rev() {
            v = v * self.0.p + c;
        }
        Ok(Fe(v))
    }
}

impl Tables {
    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            let s = (a % self.p + b % self.p) % self.p;
            out += s * place;
            place *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    fn neg_digits(&self, mut a: u32) -> u32 {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            let d = a % self.p;
            out += ((self.p - d) % self.p) * place;
            place *= self.p;
            a /= self.p;
        }
        out
    }

    fn to_poly(&self, a: u32) -> Vec<u32> {
        let mut v = Vec::new();
        let mut r = a;
        for _ in 0..self.e {
            v.push(r % self.p);
            r /= self.p;
        }
        fp_poly::trim(&mut v);
        v
    }

    fn poly_index(&self, v: &[u32]) -> u32 {
        v.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn build(&mut self) {
        let q = self.q;
        self.neg = (0..q).map(|a| self.neg_digits(a)).collect();
        if self.e > 1 && self.p != 2 && q <= 256 {
            let mut add = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = self.add_digits(a, b);
                }
            }
            self.add = Some(add);
        }
        let order = (q - 1) as u64;
        let ps = prime_divisors(order);
        let m = self.modulus.clone();
        let mul = |a: &[u32], b: &[u32]| fp_poly::mulmod(a, b, &m, self.p);
        let pow = |a: &[u32], k: u64| fp_poly::powmod(a, k, &m, self.p);
        let mut gen = None;
        for cand in 1..q {
            let c = self.to_poly(cand);
            if ps.iter().all(|&r| pow(&c, order / r) != vec![1u32]) || order == 1 {
                gen = Some(c);
                break;
            }
        }
        let g = gen.expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; 2 * order as usize + 1];
        let mut log = vec![0u32; q as usize];
        let mut cur = vec![1u32];
        for (i, slot) in exp.iter_mut().enumerate().take(order as usize) {
            let v = self.poly_index(&cur);
            *slot = v;
            log[v as usize] = i as u32;
            cur = mul(&cur, &g);
        }
        for i in order as usize..exp.len() {
            exp[i] = exp[i - order as usize];
        }
        self.exp = exp;
        self.log = log;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_choice() {
        let f9 = Fq::new(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let f4 = Fq::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        assert!(Fq::new(4, 1).is_err());
        assert!(Fq::new(2, 21).is_err());
        let f2 = Fq::new(2, 1).unwrap();
        assert_eq!(f2.q(), 2);
    }

    #[test]
    fn brute_force_smallest_irreducible_f9() {
        // lexicographic (c0, c1) over monic x^2 + c1 x + c0; irreducible iff no root in F_3
        let mut found = None;
        'outer: for c0 in 0..3u32 {
            for c1 in 0..3u32 {
                if (0..3u32).all(|x| (x * x + c1 * x + c0) % 3 != 0) {
                    found = Some((c0, c1));
                    break 'outer;
                }
            }
        }
        assert_eq!(found, Some((1, 0)));
    }

    #[test]
    fn field_axioms_and_frobenius() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2), (2, 3), (7, 1)] {
            let f = Fq::new(p, e).unwrap();
            let q = f.q() as u64;
            for a in f.elements() {
                assert_eq!(f.pow(a, q), a);
                assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
                }
                assert_eq!(f.pow(f.pth_root(a), p as u64), a);
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements().take(4) {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn coords_round_trip() {
        let f = Fq::new(3, 2).unwrap();
        for a in f.elements() {
            assert_eq!(f.from_coords(&f.coords(a)).unwrap(), a);
        }
        assert!(f.from_coords(&[3]).is_err());
    }

    #[test]
    fn order_parsing() {
        assert_eq!(Fq::with_order(9).unwrap().e(), 2);
        assert!(Fq::with_order(6).is_err());
    }
}
