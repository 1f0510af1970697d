use std::time::Instant;

use ffspecial::carlitz::{powersum_accelerated, powersum_enumerated, CarlitzCache, Engine};
use ffspecial::zeta::{
    anderson_thakur_solve, ell_bound, euler_carlitz_ratio, frobenius_check, u_set, zeta, zeta_trdeg,
};
use ffspecial::{Config, Context, Fq, Poly, RationalFunction, Var};

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

/// `D_i = ∏_{j<i} (θ^{q^i} - θ^{q^j})`, built directly.
fn d_poly(fq: &Fq, i: u32) -> Poly {
    let q = fq.q() as u64;
    let x = Poly::x(fq, Var::Theta);
    (0..i).fold(Poly::one(fq, Var::Theta), |acc, j| {
        acc.mul(&x.pow(q.pow(i)).sub(&x.pow(q.pow(j))))
    })
}

/// Coefficients of `z/e_C(z) = 1 + Σ_{(q-1)|n} ζ(n)/π̃^n z^n` up to `z^n`.
fn bernoulli_carlitz_ratios(fq: &Fq, n: usize) -> Vec<RationalFunction> {
    let q = fq.q() as usize;
    let zero = RationalFunction::zero(fq, Var::Theta);
    let mut e = vec![zero.clone(); n + 1];
    let mut i = 0u32;
    while q.pow(i) - 1 <= n {
        e[q.pow(i) - 1] = RationalFunction::new(Poly::one(fq, Var::Theta), d_poly(fq, i)).unwrap();
        i += 1;
    }
    let mut inv = vec![zero; n + 1];
    inv[0] = RationalFunction::one(fq, Var::Theta);
    for k in 1..=n {
        let s = (1..=k).fold(RationalFunction::zero(fq, Var::Theta), |acc, j| {
            acc.add(&e[j].mul(&inv[k - j]))
        });
        inv[k] = s.neg();
    }
    inv
}

#[test]
fn power_sum_engines_agree_exactly() {
    let start = Instant::now();
    for q in [2u64, 3, 4] {
        let fq = Fq::with_order(q).unwrap();
        let c = CarlitzCache::new(&fq);
        for d in 0..=5 {
            for n in 1..=4u32 {
                let a = powersum_accelerated(&c, d, n, 80);
                let e = powersum_enumerated(&c, d, n, 80, 1 << 20).unwrap();
                assert_eq!(a, e, "q={q} d={d} n={n}");
            }
        }
    }
    assert!(start.elapsed().as_secs() < 300);
}

#[test]
fn zeta_engines_agree() {
    for q in [2u64, 3] {
        let mut acc = ctx(q, 24);
        acc.cfg.engine = Engine::Accelerated;
        let mut en = ctx(q, 24);
        en.cfg.engine = Engine::Enumeration;
        for n in 4..=8 {
            let a = zeta(&acc, n, 24).unwrap();
            let e = zeta(&en, n, 24).unwrap();
            assert!(a.warnings.is_empty() && e.warnings.is_empty());
            assert_eq!(a.value, e.value, "q={q} n={n}");
        }
    }
}

#[test]
fn euler_carlitz_matches_bernoulli_carlitz_oracle() {
    let c = ctx(3, 60);
    let oracle = bernoulli_carlitz_ratios(&c.fq, 4);
    for n in [2u64, 4] {
        let start = Instant::now();
        let cert = euler_carlitz_ratio(&c, n).unwrap();
        let rec = &cert.recognition;
        assert!(rec.is_recognized(), "n={n}: {:?}", rec.note);
        assert_eq!(rec.precisions, vec![60, 80]);
        assert_eq!(rec.rational.as_ref(), Some(&oracle[n as usize]), "n={n}");
        for (r, p) in rec.residuals.iter().zip(&rec.precisions) {
            assert!(r.certainly_ge(p - 10));
        }
        assert!(start.elapsed().as_secs() < 60);
    }
}

#[test]
fn euler_carlitz_rejects_odd_index() {
    assert!(euler_carlitz_ratio(&ctx(3, 40), 3).is_err());
}

#[test]
fn frobenius_relation() {
    for (q, n) in [(2u64, 1u64), (2, 2), (3, 1)] {
        let cert = frobenius_check(&ctx(q, 100), n, 1, 100).unwrap();
        assert!(cert.passed, "q={q} n={n}: {:?}", cert.residual);
        assert!(cert.residual.certainly_ge(cert.matched_prec - 10));
    }
}

#[test]
fn frobenius_detects_a_wrong_exponent() {
    let c = ctx(3, 60);
    let z1 = zeta(&c, 1, 60).unwrap();
    let z2 = zeta(&c, 2, 60).unwrap();
    let cert = ffspecial::zeta::frobenius_compare(1, 1, &z2.value, &z1.value, 10);
    assert!(!cert.passed);
}

#[test]
fn anderson_thakur_recovery() {
    for (q, n) in [(2u64, 1u64), (3, 1), (3, 2)] {
        let cert = anderson_thakur_solve(&ctx(q, 100), n).unwrap();
        assert!(cert.passed(), "q={q} n={n}");
        assert!(cert.reverified);
        assert_eq!(cert.precisions, vec![100, 120]);
        let ell = cert.ell_n.expect("nonzero combination") as u64;
        assert!(ell * (q - 1) < n * q);
        assert!(ell <= ell_bound(q, n));
    }
}

#[test]
fn zeta_one_is_log_of_one() {
    for q in [2u64, 3] {
        let cert = anderson_thakur_solve(&ctx(q, 80), 1).unwrap();
        let fq = Fq::with_order(q).unwrap();
        assert_eq!(cert.h[0], RationalFunction::one(&fq, Var::Theta));
        assert!(cert.h[1..].iter().all(RationalFunction::is_zero));
    }
}

#[test]
fn zeta_counts() {
    assert_eq!(zeta_trdeg(3, 3, 4), 2);
    assert_eq!(zeta_trdeg(2, 2, 6), 1);
    for (p, q) in [(2u64, 4u64), (3, 3), (5, 5), (2, 8)] {
        for s in 1..=20 {
            assert_eq!(
                zeta_trdeg(p, q, s),
                1 + u_set(p, q, s).len() as u64,
                "p={p} q={q} s={s}"
            );
        }
    }
}
