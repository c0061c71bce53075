//! Symbolic results against the numeric oracle at randomly drawn moduli.

use msq_core::exact_arith::Rational;
use msq_core::highprec::Real;
use msq_core::mean_square::{l_principal_closed_form, mean_square, realjs_rhs_exact};
use msq_core::numeric_oracle::{
    characters, exp_sum_direct, l_value_numeric, mean_square_numeric, principal_character,
};
use msq_core::sin_sums::{sin_sum_exact, sin_sum_numeric};
use msq_core::symbolic::{evaluate_jordan, ClosedForm, Format, Render};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_forms_match_oracle(r in prop::sample::select(vec![1usize, 3, 4, 5, 6]), k in 3u64..=40) {
        let form = mean_square(r).unwrap();
        let symbolic = form.evaluate(k, 128).unwrap();
        let numeric = mean_square_numeric(r as u32, k, 128).unwrap();
        prop_assert!(symbolic.rel_diff(&numeric).to_f64() < 1e-30, "r={} k={}", r, k);
    }

    #[test]
    fn sine_sums_match_direct(half in 0usize..=8, k in 3u64..=200) {
        let n = 2 * half;
        let exact = Real::from_rational(&evaluate_jordan(&sin_sum_exact(n).unwrap(), k), 128);
        let direct = sin_sum_numeric(n, k, 128).unwrap();
        prop_assert!(exact.rel_diff(&direct).to_f64() < 1e-30);
    }

    #[test]
    fn realjs_symmetric_and_matches_direct(p in 1usize..=6, q in 1usize..=6, k in 3u64..=20) {
        let a = realjs_rhs_exact(p, q, k).unwrap();
        prop_assert_eq!(&a, &realjs_rhs_exact(q, p, k).unwrap());
        let direct = exp_sum_direct(p as u32, q as u32, k, false, 160).unwrap();
        let exact = Real::from_rational(&a, 160);
        let scale = exact.abs().max(&Real::one(160));
        let err = (&(&exact - &direct.re).abs() / &scale).to_f64();
        prop_assert!(err < 1e-30);
    }

    #[test]
    fn principal_values_match(half in 1usize..=5, k in 1u64..=60) {
        let r = 2 * half;
        let form = l_principal_closed_form(r).unwrap();
        let exact = &Real::from_rational(&form.rational_part(k), 160) * &Real::pi(160).powi(r);
        let numeric = l_value_numeric(r as u32, &principal_character(k).unwrap(), 128).unwrap();
        prop_assert!(exact.with_prec(128).rel_diff(&numeric.re).to_f64() < 1e-30);
    }

    #[test]
    fn conjugate_characters_give_conjugate_l_values(k in 3u64..=30, r in 2u32..=5) {
        for chi in characters(k).unwrap() {
            let a = l_value_numeric(r, &chi, 128).unwrap();
            let b = l_value_numeric(r, &chi.conj(), 128).unwrap();
            let diff = (&a - &b.conj()).max_abs();
            prop_assert!((&diff / &a.max_abs()).to_f64() < 1e-30);
        }
    }
}

#[test]
fn rendered_json_round_trips_for_theorem_outputs() {
    for r in [1usize, 3, 4, 5, 6, 7, 8] {
        for f in mean_square(r).unwrap().terms() {
            let back = ClosedForm::from_json_str(&f.render(Format::Json)).unwrap();
            assert_eq!(&back, f, "r={r}");
        }
    }
}

#[test]
fn theorem_values_stay_positive() {
    for r in [1usize, 3, 4, 5, 6, 7, 8] {
        let form = mean_square(r).unwrap();
        for k in 3..=20 {
            assert!(form.rational_part(k) > Rational::from_integer(0.into()), "r={r} k={k}");
        }
    }
}
