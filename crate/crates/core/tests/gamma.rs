use ffspecial::carlitz::CarlitzCache;
use ffspecial::gamma::{
    bracket, bracket_literal, bracket_n, bracket_n_literal, gamma_block_accelerated,
    gamma_block_enumerated, gamma_monomial_check, gamma_trdeg, gauss_mult_check, joint_trdeg,
    joint_trdeg_additive, reflection_check, translation_check, unit_residues, GammaDivisor,
};
use ffspecial::zeta::euler_carlitz_ratio;
use ffspecial::{Config, Context, Fe, Fq, Poly, RationalFunction, Var};
use proptest::prelude::*;

fn poly(fq: &Fq, c: &[i64]) -> Poly {
    Poly::from_ints(fq, Var::Theta, c)
}

fn rf(fq: &Fq, num: &[i64], den: &[i64]) -> RationalFunction {
    RationalFunction::new(poly(fq, num), poly(fq, den)).unwrap()
}

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

/// Every polynomial of degree `< deg`, zero included.
fn residues(fq: &Fq, deg: usize) -> Vec<Poly> {
    let q = fq.q() as i64;
    (0..q.pow(deg as u32))
        .map(|mut k| {
            let c: Vec<i64> = (0..deg)
                .map(|_| {
                    let d = k % q;
                    k /= q;
                    d
                })
                .collect();
            Poly::from_coeffs(
                fq,
                Var::Theta,
                c.into_iter().map(|d| Fe(d as u32)).collect(),
            )
        })
        .collect()
}

#[test]
fn gamma_blocks_closed_form_matches_enumeration() {
    for q in [2u64, 3] {
        let fq = Fq::with_order(q).unwrap();
        let c = CarlitzCache::new(&fq);
        for r in [
            rf(&fq, &[1], &[0, 1]),
            rf(&fq, &[1, 1], &[0, 0, 1]),
            rf(&fq, &[0, 1], &[1, 0, 1]),
        ] {
            for d in 0..=4 {
                let a = gamma_block_accelerated(&c, d, &r, 60).unwrap();
                let e = gamma_block_enumerated(&fq, d, &r, 60, 1 << 12).unwrap();
                assert_eq!(a.valuation(), e.valuation(), "q={q} d={d} r={r}");
                assert!(a.agrees_with(&e, 0), "q={q} d={d} r={r}");
                assert!(a.prec().min(e.prec()) >= a.valuation().lower() + 60);
            }
        }
    }
}

#[test]
fn brackets_closed_form_matches_literal_scan() {
    for q in [2u64, 3] {
        let fq = Fq::with_order(q).unwrap();
        for f in [
            poly(&fq, &[0, 1]),
            poly(&fq, &[0, 0, 1]),
            poly(&fq, &[1, 0, 1]),
        ] {
            let deg = f.deg_i64() as usize;
            for a in residues(&fq, deg) {
                for shift in [poly(&fq, &[0]), poly(&fq, &[1]), poly(&fq, &[0, 1])] {
                    let x = RationalFunction::new(a.add(&shift.mul(&f)), f.clone()).unwrap();
                    assert_eq!(bracket(&x), bracket_literal(&x), "q={q} x={x}");
                    for n in 0..=deg as u64 + 1 {
                        assert_eq!(
                            bracket_n(&x, n),
                            bracket_n_literal(&x, n),
                            "q={q} x={x} n={n}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn counting_formulas() {
    let f3 = Fq::new(3, 1).unwrap();
    assert_eq!(gamma_trdeg(&poly(&f3, &[0, 1]), 0).unwrap(), 2);
    assert_eq!(joint_trdeg(&poly(&f3, &[0, 1]), 4, 0).unwrap(), 3);
    let f2 = Fq::new(2, 1).unwrap();
    for f in [
        poly(&f2, &[0, 1]),
        poly(&f2, &[1, 1, 1]),
        poly(&f2, &[1, 0, 1, 1]),
    ] {
        assert_eq!(gamma_trdeg(&f, 0).unwrap(), 1);
    }
    assert!(gamma_trdeg(&poly(&f3, &[1]), 0).is_err());
}

#[test]
fn joint_count_is_additive_on_a_grid() {
    let mut cases = 0;
    for q in [3u64, 4, 5] {
        let fq = Fq::with_order(q).unwrap();
        for f in [
            poly(&fq, &[0, 1]),
            poly(&fq, &[1, 0, 1]),
            poly(&fq, &[0, 0, 1]),
        ] {
            for s in [1u64, 4, 7] {
                if cases == 20 {
                    break;
                }
                assert_eq!(
                    joint_trdeg(&f, s, 0).unwrap(),
                    joint_trdeg_additive(&f, s, 0).unwrap(),
                    "q={q} f={f} s={s}"
                );
                cases += 1;
            }
        }
    }
    assert_eq!(cases, 20);
}

#[test]
fn functional_equations_at_q3() {
    let c = ctx(3, 60);
    let r = rf(&c.fq, &[1], &[0, 1]);
    let mut certs = vec![
        reflection_check(&c, &r).unwrap(),
        gauss_mult_check(&c, &r, &poly(&c.fq, &[0, 1])).unwrap(),
    ];
    for a in [poly(&c.fq, &[1]), poly(&c.fq, &[0, 1])] {
        certs.push(translation_check(&c, &r, &a).unwrap());
    }
    for cert in certs {
        assert!(cert.is_recognized(), "{}", cert.label);
        assert_eq!(cert.precisions, vec![60, 80]);
    }
}

#[test]
fn q2_values_are_rational_multiples_of_pi() {
    let c = ctx(2, 60);
    let g =
        gamma_monomial_check(&c, "gamma-over-pi", vec![(rf(&c.fq, &[1], &[0, 1]), 1)], 1).unwrap();
    assert!(g.is_recognized());
    let z = euler_carlitz_ratio(&c, 1).unwrap();
    assert!(z.recognition.is_recognized());
}

#[test]
fn preconditions() {
    let c = ctx(3, 40);
    assert!(reflection_check(&c, &rf(&c.fq, &[0, 1], &[1])).is_err());
    assert!(gauss_mult_check(&c, &rf(&c.fq, &[1], &[0, 1]), &poly(&c.fq, &[1])).is_err());
    assert!(GammaDivisor::new(&poly(&c.fq, &[0, 2])).is_err());
}

fn arb_rational(fq: Fq) -> impl Strategy<Value = RationalFunction> {
    let q = fq.q();
    (
        prop::collection::vec(0..q, 1..6),
        prop::collection::vec(0..q, 0..4),
    )
        .prop_map(move |(num, den)| {
            let mut d: Vec<Fe> = den.into_iter().map(Fe).collect();
            d.push(Fe::ONE);
            let n = Poly::from_coeffs(&fq, Var::Theta, num.into_iter().map(Fe).collect());
            RationalFunction::new(n, Poly::from_coeffs(&fq, Var::Theta, d)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn bracket_has_at_most_one_level(x in arb_rational(Fq::new(3, 1).unwrap())) {
        let top = x.den().deg_i64() as u64 + 3;
        let hits = (0..=top).filter(|&n| bracket_n(&x, n) == 1).count();
        prop_assert!(hits <= 1);
        prop_assert_eq!(bracket(&x) as usize, hits);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn star_preserves_weight(mults in prop::collection::vec(-3i64..4, 9), pick in 0usize..8) {
        let fq = Fq::new(3, 1).unwrap();
        let f = poly(&fq, &[1, 0, 1]);
        let div = GammaDivisor::from_terms(&f, residues(&fq, 2).into_iter().zip(mults)).unwrap();
        let units = unit_residues(&f);
        let a = &units[pick % units.len()];
        prop_assert_eq!(div.star(a).unwrap().weight(), div.weight());
    }
}
