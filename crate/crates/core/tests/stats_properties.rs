use cswl_core::stats::{one_sample_t, paired_t, summarize};
use proptest::prelude::*;

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 2..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn summary_bounds(xs in prop::collection::vec(-5.0f64..5.0, 1..60)) {
        let s = summarize(&xs).unwrap();
        prop_assert_eq!(s.n, xs.len());
        prop_assert!(s.se <= s.sd && s.sd >= 0.0);
        prop_assert!(s.mean.is_finite() && s.sd.is_finite());
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo - 1e-12 <= s.mean && s.mean <= hi + 1e-12);
    }

    #[test]
    fn p_values_are_probabilities(xs in sample(), mu in 0.0f64..1.0) {
        if let Ok(r) = one_sample_t(&xs, mu) {
            prop_assert!((0.0..=1.0).contains(&r.p_two_sided));
            prop_assert!((0.0..=1.0).contains(&r.p_one_sided));
            prop_assert_eq!(r.df, xs.len() - 1);
            // one tail is half the two-sided value on the side of t
            let tail = if r.t >= 0.0 { r.p_one_sided } else { 1.0 - r.p_one_sided };
            prop_assert!((2.0 * tail - r.p_two_sided).abs() < 1e-9);
            prop_assert!(!r.significant_1pct || r.significant_5pct);
        }
    }

    #[test]
    fn paired_is_one_sample_on_differences(pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..40)) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        match (paired_t(&a, &b), one_sample_t(&diff, 0.0)) {
            (Ok(p), Ok(o)) => prop_assert_eq!(p, o),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "paired and one-sample disagree"),
        }
        // swapping the arguments flips the sign
        if let (Ok(ab), Ok(ba)) = (paired_t(&a, &b), paired_t(&b, &a)) {
            prop_assert!((ab.t + ba.t).abs() < 1e-9);
            prop_assert!((ab.p_two_sided - ba.p_two_sided).abs() < 1e-12);
        }
    }
}
