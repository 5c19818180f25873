//! Invariants of the Airy layer and the series, checked on random inputs.

use parabolic_max::airy::{airy_eval, airy_zero, shared_zero_table};
use parabolic_max::series::{
    density_fm, density_fn, eval_point, tail_probability_g, HittingKernel, SeriesConfig, TailMode,
};
use proptest::prelude::*;

fn cfg() -> SeriesConfig {
    SeriesConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn wronskian_is_one_over_pi(x in -60.0f64..10.0) {
        let v = airy_eval(x).unwrap();
        let scale = 1.0 + (v.ai * v.bip).abs() + (v.aip * v.bi).abs();
        prop_assert!((v.wronskian() - std::f64::consts::FRAC_1_PI).abs() <= 1e-13 * scale);
    }

    #[test]
    fn zeros_are_roots_and_interlace(k in 1usize..20_000) {
        let r = airy_zero::<f64>(k).unwrap();
        let next = airy_zero::<f64>(k + 1).unwrap();
        prop_assert!(next.a < r.a);
        prop_assert!(airy_eval(r.a).unwrap().ai.abs() <= 1e-12 * r.aip.abs());
        prop_assert!(r.aip * next.aip < 0.0);
        prop_assert!(r.phi < 0.0);
    }

    #[test]
    fn tail_probability_is_monotone(x in 0.0f64..5.0, dx in 1e-3f64..1.0) {
        let (a, b) = (tail_probability_g(x, &cfg()).unwrap(), tail_probability_g(x + dx, &cfg()).unwrap());
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(b <= a, "G({x}) = {a} < G({}) = {b}", x + dx);
    }

    #[test]
    fn m_law_is_square_of_n_law(x in 0.01f64..5.0) {
        let p = eval_point(x, &cfg()).unwrap();
        prop_assert_eq!(p.cdf_m, p.cdf_n * p.cdf_n);
        prop_assert_eq!(p.f_n, density_fn(x, &cfg()).unwrap());
        prop_assert_eq!(p.f_m, density_fm(x, &cfg()).unwrap());
        prop_assert!(p.f_m >= 0.0 && p.f_m <= 2.0 * p.f_n);
    }

    #[test]
    fn tail_sum_does_not_depend_on_cutoff(x in 0.05f64..4.0) {
        let at = |terms| tail_probability_g(x, &SeriesConfig { terms, ..cfg() }).unwrap();
        let (a, b, c) = (at(200), at(450), at(1500));
        prop_assert!((a - b).abs() < 1e-11 && (a - c).abs() < 1e-11, "{a} {b} {c}");
    }

    #[test]
    fn truncation_converges_to_tail_sum(x in 0.2f64..3.0) {
        let full = tail_probability_g(x, &cfg()).unwrap();
        let err = |terms| (tail_probability_g(x, &SeriesConfig::truncated(terms)).unwrap() - full).abs();
        prop_assert!(err(4000) < 1e-7);
        prop_assert!(err(4000) <= err(50) + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn hitting_density_carries_the_defect_mass(x in 0.2f64..2.0) {
        let k = HittingKernel::<f64>::new(x, &cfg()).unwrap();
        let mass = k.mass(0.0, 8.0).unwrap().value;
        let g = tail_probability_g(x, &cfg()).unwrap();
        prop_assert!((mass - g).abs() < 1e-9, "x = {x}: {mass} vs {g}");
        for i in 1..40 {
            prop_assert!(k.density(0.2 * i as f64).unwrap() >= 0.0);
        }
    }
}

#[test]
fn g_is_one_at_the_origin_and_vanishes_at_infinity() {
    assert_eq!(tail_probability_g(0.0, &cfg()).unwrap(), 1.0);
    assert!(tail_probability_g(8.0, &cfg()).unwrap() < 1e-8);
}

#[test]
fn zero_table_matches_direct_refinement() {
    let table = shared_zero_table::<f64>(500).unwrap();
    for k in [1, 2, 17, 199, 200, 201, 500] {
        assert_eq!(*table.get(k), airy_zero::<f64>(k).unwrap(), "k = {k}");
    }
}

#[test]
fn asymptotic_tails_need_a_minimum_cutoff() {
    assert!(SeriesConfig { terms: 10, tail_mode: TailMode::None, ..cfg() }.validate().is_ok());
    assert!(SeriesConfig { terms: 10, tail_mode: TailMode::Asymptotic, ..cfg() }.validate().is_err());
}
