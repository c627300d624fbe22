mod common;

use common::*;
use fpa_core::compose::*;
use fpa_core::feedback::relative_degree;
use fpa_core::growth::fit_growth;
use fpa_core::series::{ultrametric, ultrametric_norm};
use fpa_core::shuffle::shuffle;
use fpa_core::{q, CommSeries, FpaError, Monomial, NCSeries, Word};
use proptest::prelude::*;
use rand::Rng;

fn oracle_comp(c: &NCSeries, d: &NCSeries, n: usize) -> NCSeries {
    let ds: Vec<Poly> = (0..d.ell()).map(|i| poly_of(d, i)).collect();
    let parts: Vec<Poly> = (0..c.ell()).map(|i| oracle_composition(&poly_of(c, i), c.m(), &ds, n)).collect();
    to_series(d.m(), n, &parts)
}

fn oracle_mix(c: &NCSeries, d: &NCSeries, n: usize) -> NCSeries {
    let ds: Vec<Poly> = (0..d.ell()).map(|i| poly_of(d, i)).collect();
    let parts: Vec<Poly> = (0..c.ell()).map(|i| oracle_mixed(&poly_of(c, i), c.m(), &ds, n)).collect();
    to_series(c.m(), n, &parts)
}

#[test]
fn composition_examples() {
    let d = nc(2, 4, &[("e", q(2)), ("x2", q(1)), ("x0x1", q(-3))]);
    let x1 = nc(1, 4, &[("x1", q(1))]);
    let x0 = nc(1, 4, &[("x0", q(1))]);
    let got = composition(&x1, &d, 4).unwrap();
    assert_eq!(got, nc(2, 4, &[("x0", q(2)), ("x0x2", q(1)), ("x0x0x1", q(-3))]));
    assert_eq!(composition(&x0, &d, 4).unwrap(), nc(2, 4, &[("x0", q(1))]));
    let two = NCSeries::from_components(&[d.clone(), d.clone()]).unwrap();
    assert!(matches!(composition(&x1, &two, 4), Err(FpaError::ShapeMismatch(_))));
}

#[test]
fn mixed_examples() {
    let c = nc(1, 4, &[("e", q(3)), ("x1", q(1)), ("x1x0", q(2))]);
    assert_eq!(mixed_composition(&c, &NCSeries::zero(1, 1, 4), 4).unwrap(), c);
    let d = nc(1, 4, &[("e", q(1)), ("x1", q(-1))]);
    let x1 = nc(1, 4, &[("x1", q(1))]);
    assert_eq!(mixed_composition(&x1, &d, 4).unwrap(), nc(1, 4, &[("x1", q(1)), ("x0", q(1)), ("x0x1", q(-1))]));
}

#[test]
fn group_identities() {
    let c = nc(1, 4, &[("x1", q(1)), ("x0x1", q(2))]);
    let z = NCSeries::zero(1, 1, 4);
    assert_eq!(group_product(&c, &z, 4).unwrap(), c);
    assert_eq!(group_product(&z, &c, 4).unwrap(), c);
    assert_eq!(group_inverse(&z, 4).unwrap(), z);
}

#[test]
fn star_composition_growth() {
    let n = 6;
    let s = star(1, 1, n);
    let cd = composition(&s, &s, n).unwrap();
    assert_eq!(cd, oracle_comp(&s, &s, n));
    assert_eq!(cd.max_abs_by_length(), vec![1.0, 1.0, 1.0, 2.0, 4.0, 9.0, 27.0]);
    assert!(fit_growth(&cd, 0.0).is_none());
    assert!(fit_growth(&cd, 1.0).is_some());
    let fs = fit_growth(&s, 0.0).unwrap();
    assert_eq!((fs.k, fs.m), (1.0, 1.0));
}

#[test]
fn wiener_fliess_goldens() {
    let c = nc(1, 3, &[("e", q(1)), ("x1", q(1))]);
    let sq = CommSeries::univariate(&[(2, q(1))]);
    let want = nc(1, 3, &[("e", q(1)), ("x1", q(2)), ("x1x1", q(2))]);
    assert_eq!(wf_compose(&sq, &c, 3).unwrap(), want);
    assert_eq!(wf_compose_hopf(&sq, &c, 3).unwrap(), want);
    let d = CommSeries::univariate(&[(2, q(1)), (1, q(-2))]);
    let want = nc(1, 3, &[("e", q(-1)), ("x1x1", q(2))]);
    let got = wf_compose(&d, &c, 3).unwrap();
    assert_eq!(got, want);
    assert_eq!(wf_compose_hopf(&d, &c, 3).unwrap(), want);
    assert!(relative_degree(&got).unwrap().r.is_none());
    assert_eq!(relative_degree(&c).unwrap().r, Some(1));
}

#[test]
fn identity_map_reads_off() {
    let c = nc(1, 4, &[("e", q(5)), ("x0x1", q(1))]);
    assert_eq!(wf_compose(&CommSeries::identity(1), &c, 4).unwrap(), c);
}

#[test]
fn inadmissible_pair_rejected() {
    let c = nc(1, 3, &[("e", q(1)), ("x1", q(1))]);
    let mut d = CommSeries::zero(1, 1, 3, false);
    d.add_coeff(Monomial(vec![1]), 0, q(1)).unwrap();
    assert!(matches!(wf_compose(&d, &c, 3), Err(FpaError::Inadmissible(_))));
    assert!(matches!(wf_compose_hopf(&d, &c, 3), Err(FpaError::Inadmissible(_))));
    d.set_polynomial(true);
    assert_eq!(wf_compose(&d, &c, 3).unwrap(), c);
}

#[test]
fn truncated_map_limits_result_degree() {
    let c = nc(1, 6, &[("x1", q(1))]);
    let mut d = CommSeries::zero(1, 1, 3, false);
    d.add_coeff(Monomial(vec![1]), 0, q(1)).unwrap();
    assert_eq!(wf_compose(&d, &c, 6).unwrap().maxdeg(), 3);
}

/// Proper SISO series with relative degree `r` and gain `k`.
fn with_relative_degree(rng: &mut rand_chacha::ChaCha8Rng, r: usize, k: i64, n: usize) -> NCSeries {
    let mut c = NCSeries::zero(1, 1, n);
    let mut lead = vec![0; r - 1];
    lead.push(1);
    c.set(Word(lead), 0, q(k)).unwrap();
    for j in 1..=n {
        if rng.gen_bool(0.5) {
            c.set(Word(vec![0; j]), 0, q(rng.gen_range(-3..=3))).unwrap();
        }
    }
    for w in fpa_core::word::enumerate_words_upto(1, n + 1 - r) {
        if w.len() >= 2 && w.0.contains(&1) && rng.gen_bool(0.3) {
            let mut full = vec![0; r - 1];
            full.extend(&w.0);
            c.set(Word(full), 0, q(rng.gen_range(-3..=3))).unwrap();
        }
    }
    c
}

#[test]
fn relative_degree_preserved_by_static_map() {
    let mut g = rng(11);
    for _ in 0..10 {
        let r = g.gen_range(1..=3);
        let k = g.gen_range(1..=3);
        let c = with_relative_degree(&mut g, r, k, 6);
        assert_eq!(relative_degree(&c).unwrap().r, Some(r));
        let mut d = rand_comm(&mut g, 1, 1, 4, true, 0.6);
        d.add_coeff(Monomial(vec![1]), 0, q(2)).unwrap();
        if d.coeff(&Monomial(vec![1]), 0).unwrap() == q(0) {
            continue;
        }
        assert_eq!(relative_degree(&wf_compose(&d, &c, 6).unwrap()).unwrap().r, Some(r));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn composition_matches_left_quotient_oracle(c in arb_nc(1, 1, 4, false), d in arb_nc(2, 1, 4, false)) {
        prop_assert_eq!(composition(&c, &d, 4).unwrap(), oracle_comp(&c, &d, 4));
    }

    #[test]
    fn composition_two_inputs(c in arb_nc(2, 2, 3, false), d in arb_nc(1, 2, 3, false)) {
        prop_assert_eq!(composition(&c, &d, 3).unwrap(), oracle_comp(&c, &d, 3));
    }

    #[test]
    fn mixed_matches_left_quotient_oracle(c in arb_nc(1, 1, 4, false), d in arb_nc(1, 1, 4, false)) {
        prop_assert_eq!(mixed_composition(&c, &d, 4).unwrap(), oracle_mix(&c, &d, 4));
    }

    #[test]
    fn left_linearity(c in arb_nc(1, 1, 4, false), c2 in arb_nc(1, 1, 4, true), d in arb_nc(1, 1, 4, false)) {
        let sum = c.add(&c2).unwrap();
        prop_assert_eq!(composition(&sum, &d, 4).unwrap(), composition(&c, &d, 4).unwrap().add(&composition(&c2, &d, 4).unwrap()).unwrap());
        prop_assert_eq!(mixed_composition(&sum, &d, 4).unwrap(), mixed_composition(&c, &d, 4).unwrap().add(&mixed_composition(&c2, &d, 4).unwrap()).unwrap());
    }

    #[test]
    fn shuffle_distributes(c in arb_nc(1, 1, 4, false), d in arb_nc(1, 1, 4, false), e in arb_nc(1, 1, 4, false)) {
        let l = mixed_composition(&shuffle(&c, &d, 4).unwrap(), &e, 4).unwrap();
        let r = shuffle(&mixed_composition(&c, &e, 4).unwrap(), &mixed_composition(&d, &e, 4).unwrap(), 4).unwrap();
        prop_assert_eq!(l, r);
        let l = composition(&shuffle(&c, &d, 4).unwrap(), &e, 4).unwrap();
        let r = shuffle(&composition(&c, &e, 4).unwrap(), &composition(&d, &e, 4).unwrap(), 4).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn right_action(c in arb_nc(1, 1, 4, false), d in arb_nc(1, 1, 4, false), e in arb_nc(1, 1, 4, false)) {
        let l = mixed_composition(&mixed_composition(&c, &d, 4).unwrap(), &e, 4).unwrap();
        let r = mixed_composition(&c, &group_product(&d, &e, 4).unwrap(), 4).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn group_is_associative(c in arb_nc(1, 1, 4, false), d in arb_nc(1, 1, 4, false), e in arb_nc(1, 1, 4, false)) {
        let l = group_product(&group_product(&c, &d, 4).unwrap(), &e, 4).unwrap();
        let r = group_product(&c, &group_product(&d, &e, 4).unwrap(), 4).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn group_inverse_laws(c in arb_nc(1, 1, 5, false)) {
        let inv = group_inverse(&c, 5).unwrap();
        prop_assert!(group_product(&c, &inv, 5).unwrap().is_zero());
        prop_assert!(group_product(&inv, &c, 5).unwrap().is_zero());
        prop_assert_eq!(group_inverse(&inv, 5).unwrap(), c);
    }

    #[test]
    fn group_inverse_two_channels(c in arb_nc(2, 2, 3, false)) {
        let inv = group_inverse(&c, 3).unwrap();
        prop_assert!(group_product(&c, &inv, 3).unwrap().is_zero());
    }

    #[test]
    fn wf_matches_oracle_and_hopf_route_proper(d in arb_comm(2, 1, 5, false), c in arb_nc(1, 2, 5, true)) {
        let got = wf_compose(&d, &c, 5).unwrap();
        prop_assert_eq!(&got, &to_series(1, 5, &[oracle_wf(&d, 0, &c, 5)]));
        prop_assert_eq!(got, wf_compose_hopf(&d, &c, 5).unwrap());
    }

    #[test]
    fn wf_matches_oracle_and_hopf_route_polynomial(d in arb_comm(1, 2, 3, true), c in arb_nc(1, 1, 4, false)) {
        let got = wf_compose(&d, &c, 4).unwrap();
        let parts: Vec<Poly> = (0..2).map(|k| oracle_wf(&d, k, &c, 4)).collect();
        prop_assert_eq!(&got, &to_series(1, 4, &parts));
        prop_assert_eq!(got, wf_compose_hopf(&d, &c, 4).unwrap());
    }

    #[test]
    fn wf_left_linearity(d in arb_comm(1, 1, 4, false), e in arb_comm(1, 1, 4, false), s in arb_q(), c in arb_nc(1, 1, 4, true)) {
        let l = wf_compose(&d.scale(&s).add(&e).unwrap(), &c, 4).unwrap();
        let r = wf_compose(&d, &c, 4).unwrap().scale(&s).add(&wf_compose(&e, &c, 4).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn wf_mixed_associativity(d in arb_comm(1, 1, 4, false), c in arb_nc(1, 1, 4, true), e in arb_nc(1, 1, 4, false)) {
        let l = wf_compose(&d, &mixed_composition(&c, &e, 4).unwrap(), 4).unwrap();
        let r = mixed_composition(&wf_compose(&d, &c, 4).unwrap(), &e, 4).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn wf_mixed_associativity_polynomial(d in arb_comm(1, 1, 3, true), c in arb_nc(1, 1, 4, false), e in arb_nc(1, 1, 4, false)) {
        let l = wf_compose(&d, &mixed_composition(&c, &e, 4).unwrap(), 4).unwrap();
        let r = mixed_composition(&wf_compose(&d, &c, 4).unwrap(), &e, 4).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn monomial_contraction(c in arb_nc(1, 1, 6, true), c2 in arb_nc(1, 1, 6, true), k in 1u32..4) {
        let eta = Monomial(vec![k]);
        let a = monomial_compose(&eta, &c, 6).unwrap();
        let b = monomial_compose(&eta, &c2, 6).unwrap();
        let s = 0.5;
        let lhs = ultrametric(&a, &b, s).unwrap();
        let kmax = ultrametric_norm(&c, s).unwrap().max(ultrametric_norm(&c2, s).unwrap());
        let rhs = kmax.powi(k as i32 - 1) * ultrametric(&c, &c2, s).unwrap();
        prop_assert!(lhs <= rhs, "{} > {}", lhs, rhs);
    }

    #[test]
    fn monomial_weak_contraction(c in arb_nc(1, 1, 5, false), c2 in arb_nc(1, 1, 5, false), k in 1u32..4) {
        let eta = Monomial(vec![k]);
        let a = monomial_compose(&eta, &c, 5).unwrap();
        let b = monomial_compose(&eta, &c2, 5).unwrap();
        prop_assert!(ultrametric(&a, &b, 0.5).unwrap() <= ultrametric(&c, &c2, 0.5).unwrap());
    }
}
