use std::time::Instant;

use ffspecial::carlitz::{pi_tilde, polylog};
use ffspecial::motives::{
    build_carlitz_power, build_direct_sum, build_polylog_motive, build_zeta_motive, det_shape,
    l_series, omega_trunc, verify_trivialization, TPoly, TSeriesTrunc,
};
use ffspecial::zeta::{anderson_thakur_solve, u_set};
use ffspecial::{Config, Context, Error, ExtScalar, Fe, Fq, Level, PrecSeries, TowerScalar};
use proptest::prelude::*;

const P: i64 = 100;
const T: usize = 30;

fn ctx(q: u64) -> Context {
    Context::with_order(q, Config::default()).unwrap()
}

#[test]
fn carlitz_tensor_powers_verify() {
    for q in [2u64, 3] {
        let fq = Fq::with_order(q).unwrap();
        for n in 1..=4 {
            let sys = build_carlitz_power(&fq, n, T, P, P - 10).unwrap();
            assert!(sys.certificate.passed);
            assert_eq!(sys.det.exponent, n);
        }
    }
}

#[test]
fn zeta_motives_verify() {
    for q in [2u64, 3] {
        let c = ctx(q);
        for n in 1..=3u64 {
            let start = Instant::now();
            let cert = anderson_thakur_solve(&c, n).unwrap();
            let sys = build_zeta_motive(&c.fq, &cert, T, P, P - 10).unwrap();
            assert!(sys.certificate.passed, "q={q} n={n}");
            assert_eq!(sys.size(), cert.m_n + 2);
            assert_eq!(sys.det.exponent as u64, n);
            assert!(start.elapsed().as_secs() < 30);
        }
    }
}

#[test]
fn polylog_entry_specializes_to_polylog_times_omega_power() {
    let c = ctx(3);
    let n = 2u32;
    let cert = anderson_thakur_solve(&c, n as u64).unwrap();
    let sys = build_zeta_motive(&c.fq, &cert, T, P, P - 10).unwrap();
    let at = sys.psi[1][0].evaluate_at_theta(P).unwrap();
    assert!(at.tail_certified);
    let alpha = ExtScalar::from_series(PrecSeries::theta_pow(&c.fq, cert.iota[0] as i64));
    let pl = polylog(&c.cache, n, &alpha, P + 20).unwrap();
    let minus_inv_pi = pi_tilde(&c.cache, P + 20).inv().unwrap().neg();
    let expect = pl.mul(&minus_inv_pi.pow(n as u64));
    assert!(
        at.value.agrees_to(&expect, P - 10),
        "{} vs {}",
        at.value,
        expect
    );
}

#[test]
fn l_series_specializes_to_polylog() {
    let c = ctx(3);
    for (i, n) in [(0usize, 2u32), (1, 2), (2, 3)] {
        let alpha = TowerScalar::theta(&c.fq, Level::Zero).pow(i as u64);
        let l = l_series(&alpha, n, 60, P + 60).unwrap();
        let v = l.evaluate_at_theta(P).unwrap();
        assert!(v.tail_certified, "i={i} n={n} tail {}", v.tail_bound);
        let a = ExtScalar::from_series(PrecSeries::theta_pow(&c.fq, i as i64));
        let expect = polylog(&c.cache, n, &a, P + 20).unwrap();
        assert!(v.value.agrees_to(&expect, P - 10));
    }
}

#[test]
fn l_series_zero_and_out_of_disk() {
    let fq = Fq::new(3, 1).unwrap();
    let zero = l_series(&TowerScalar::zero(&fq, Level::Zero), 1, T, P).unwrap();
    assert_eq!(zero, TSeriesTrunc::zero(&fq, T));
    let big = TowerScalar::theta(&fq, Level::Zero).pow(3);
    assert!(matches!(l_series(&big, 2, T, P), Err(Error::OutOfDisk(_))));
}

#[test]
fn l_series_functional_equation_grid() {
    // (Ω^n L)^(-1) = α^(-1)(t-θ)^n Ω^n + Ω^n L, through the 2x2 system
    for q in [2u64, 3] {
        let fq = Fq::with_order(q).unwrap();
        for n in 1..=4u32 {
            let bound = (n as u64 * q - 1) / (q - 1);
            for i in 0..=bound as usize {
                let sys = build_polylog_motive(&fq, n, &[i], T, P, P - 10).unwrap();
                assert!(sys.certificate.passed, "q={q} n={n} i={i}");
            }
        }
    }
}

#[test]
fn perturbed_psi_fails() {
    let fq = Fq::new(3, 1).unwrap();
    let sys = build_carlitz_power(&fq, 2, T, P, P - 10).unwrap();
    let bump = ExtScalar::from_series(PrecSeries::monomial(&fq, Fe::ONE, 40, P + 30));
    let mut psi = sys.psi.clone();
    psi[0][0] = psi[0][0].with_coeff(3, psi[0][0].coeff(3).add(&bump));
    let cert = verify_trivialization(&sys.phi, &psi, P - 10).unwrap();
    assert!(!cert.passed);
    assert_eq!(cert.worst.map(|w| w.2), Some(3));
}

#[test]
fn direct_sum_verifies_blockwise() {
    let c = ctx(3);
    let blocks: Vec<_> = u_set(3, 3, 4)
        .into_iter()
        .map(|n| {
            build_zeta_motive(&c.fq, &anderson_thakur_solve(&c, n).unwrap(), T, P, P - 10).unwrap()
        })
        .collect();
    assert_eq!(blocks.len(), 1);
    let single = build_direct_sum(&blocks).unwrap();
    assert_eq!(single.phi, blocks[0].phi);
    assert_eq!(single.psi, blocks[0].psi);

    let two = vec![
        blocks[0].clone(),
        build_carlitz_power(&c.fq, 2, T, P, P - 10).unwrap(),
    ];
    let sum = build_direct_sum(&two).unwrap();
    assert_eq!(sum.size(), blocks[0].size() + 1);
    assert_eq!(sum.det.exponent, 3);
    assert!(build_direct_sum(&[]).is_err());
}

#[test]
fn det_shape_rejects_bad_matrices() {
    let fq = Fq::new(3, 1).unwrap();
    let t = TPoly::from_coeffs(
        &fq,
        vec![
            TowerScalar::zero(&fq, Level::Zero),
            TowerScalar::one(&fq, Level::Zero),
        ],
    );
    assert!(det_shape(&[vec![t]]).is_err());
    let one = TPoly::one(&fq);
    let full = vec![vec![one.clone(), one.clone()], vec![one.clone(), one]];
    assert!(det_shape(&full).is_err());
    let c = TPoly::constant(TowerScalar::constant(&fq, Level::Zero, Fe(2)));
    let shape = det_shape(&[vec![c.mul(&TPoly::t_minus_theta(&fq).pow(2))]]).unwrap();
    assert_eq!(shape.exponent, 2);
}

#[test]
fn evaluate_constant_and_guard() {
    let fq = Fq::new(3, 1).unwrap();
    let one = TSeriesTrunc::one(&fq, T).evaluate_at_theta(P).unwrap();
    assert!(one.tail_certified);
    assert!(one.value.agrees_to(&ExtScalar::one(&fq), P));
    // Σ t^j has coefficients that never decay
    let flat = TSeriesTrunc::from_coeffs(&fq, vec![ExtScalar::one(&fq); T], T);
    assert!(flat.evaluate_at_theta(P).is_err());
}

#[test]
fn omega_value_all_fields() {
    for q in [2u64, 3, 4] {
        let fq = Fq::with_order(q).unwrap();
        let start = Instant::now();
        let om = omega_trunc(&fq, T, P + T as i64);
        let v = om.evaluate_at_theta(P).unwrap();
        let c = ffspecial::carlitz::CarlitzCache::new(&fq);
        let prod = v.value.mul(&pi_tilde(&c, P + 10));
        assert!(prod.agrees_to(&ExtScalar::one(&fq).neg(), P - 10));
        assert!(start.elapsed().as_secs() < 5);
    }
}

fn arb_tseries(fq: Fq) -> impl Strategy<Value = TSeriesTrunc> {
    let q = fq.q();
    prop::collection::vec(prop::collection::vec(0..q, 12), 6).prop_map(move |rows| {
        let coeffs = rows
            .iter()
            .enumerate()
            .map(|(j, r)| {
                let s = PrecSeries::from_terms(
                    &fq,
                    j as i64 - 2,
                    r.iter().map(|&x| Fe(x)).collect(),
                    40,
                );
                ExtScalar::from_series(s)
            })
            .collect();
        TSeriesTrunc::from_coeffs(&fq, coeffs, 6)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn twist_is_a_ring_homomorphism(
        a in arb_tseries(Fq::new(3, 1).unwrap()),
        b in arb_tseries(Fq::new(3, 1).unwrap()),
    ) {
        let prod_tw = a.mul(&b).twist(1, None);
        let tw_prod = a.twist(1, None).mul(&b.twist(1, None));
        let thr = prod_tw.min_prec().min(tw_prod.min_prec());
        for (x, y) in prod_tw.coeffs().iter().zip(tw_prod.coeffs()) {
            prop_assert!(x.agrees_to(y, thr));
        }
        let sum_tw = a.add(&b).twist(1, None);
        let tw_sum = a.twist(1, None).add(&b.twist(1, None));
        prop_assert_eq!(sum_tw, tw_sum);
    }

    #[test]
    fn twist_commutes_with_truncation(a in arb_tseries(Fq::new(2, 1).unwrap()), p in 5i64..30) {
        let lhs = a.truncate_prec(p).twist(1, None);
        let rhs = a.twist(1, None).truncate_prec(2 * p);
        prop_assert_eq!(lhs, rhs);
    }
}
