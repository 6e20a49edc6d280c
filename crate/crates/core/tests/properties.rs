//! Randomized invariants over the public API.

use cvbell_core::{
    bell_value_equal_settings, bell_value_general, build_ghz_state, class_coefficients,
    mk_expand, pi_closed_form, pi_from_state, wigner_at, PhasePoint, SettingsTable,
    SqueezingParameter,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn small_alpha() -> impl Strategy<Value = Complex64> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(x, p)| Complex64::new(x, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn correlation_is_bounded(
        n in 2usize..6,
        r in 0.0f64..1.5,
        seed in proptest::collection::vec(small_alpha(), 6),
    ) {
        let alphas = seed[..n].to_vec();
        let point = PhasePoint::new(alphas).unwrap();
        let v = pi_closed_form(n, r, &point).unwrap().value();
        prop_assert!(v.abs() <= 1.0 + 1e-12, "Pi out of range: {v}");
    }

    #[test]
    fn correlation_paths_agree(
        n in 2usize..5,
        r in 0.0f64..1.2,
        seed in proptest::collection::vec(small_alpha(), 5),
    ) {
        let alphas = seed[..n].to_vec();
        let point = PhasePoint::new(alphas).unwrap();
        let closed = pi_closed_form(n, r, &point).unwrap().value();
        let state = build_ghz_state(n, SqueezingParameter::new(r).unwrap()).unwrap();
        let via_wigner = pi_from_state(&state, &point).unwrap().value();
        let scale = closed.abs().max(1e-30);
        prop_assert!(
            ((closed - via_wigner) / scale).abs() < 1e-9,
            "paths diverge: {closed} vs {via_wigner}"
        );
    }

    #[test]
    fn wigner_is_positive_and_peaked_at_most_vacuum_height(
        n in 2usize..5,
        r in 0.0f64..1.2,
        seed in proptest::collection::vec(small_alpha(), 4),
    ) {
        let state = build_ghz_state(n, SqueezingParameter::new(r).unwrap()).unwrap();
        let point = PhasePoint::new(seed[..n].to_vec()).unwrap();
        let w = wigner_at(&state, &point).unwrap();
        let peak = libm::pow(2.0 / core::f64::consts::PI, n as f64);
        prop_assert!(w > 0.0);
        prop_assert!(w <= peak * (1.0 + 1e-12), "w = {w} above pure-state peak {peak}");
    }

    #[test]
    fn expansion_terms_match_class_grouping(n in 2usize..11) {
        let terms = mk_expand(n).unwrap();
        let classes = class_coefficients(n).unwrap();
        for t in &terms {
            let k = t.selector.count_ones() as usize;
            prop_assert_eq!(&t.coefficient, &classes.coeffs()[k]);
        }
        // every populated class accounted for
        let mut counts = vec![0usize; n + 1];
        for t in &terms {
            counts[t.selector.count_ones() as usize] += 1;
        }
        for (k, c) in classes.coeffs().iter().enumerate() {
            let expect = if c.is_zero() { 0 } else { binomial(n, k) };
            prop_assert_eq!(counts[k], expect, "class {}", k);
        }
    }

    #[test]
    fn general_evaluation_reduces_to_equal_settings(
        n in 2usize..6,
        r in 0.0f64..1.2,
        j in 0.0f64..0.6,
    ) {
        let settings = SettingsTable::equal_settings(n, j).unwrap();
        let general = bell_value_general(n, r, &settings).unwrap();
        let class = bell_value_equal_settings(n, r, j);
        prop_assert!(
            (general.value - class.value).abs() < 1e-11,
            "{} vs {}",
            general.value,
            class.value
        );
    }

    #[test]
    fn bell_value_respects_l1_bound(
        n in 2usize..9,
        r in 0.0f64..2.0,
        j in 0.0f64..2.0,
    ) {
        let v = bell_value_equal_settings(n, r, j);
        let bound = libm::exp2((n / 2 + 1) as f64);
        prop_assert!(v.value.abs() <= bound + 1e-9);
        prop_assert!(v.cancellation_estimate >= 0.0);
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
