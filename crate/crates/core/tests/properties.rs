//! Property tests for the distribution and extremes invariants.

use proptest::prelude::*;

use tailfit::distributions::{cdf, quantile, DistributionModel};
use tailfit::extremes::{exceedances, hill_series, Sample};

fn arb_model() -> impl Strategy<Value = DistributionModel> {
    prop_oneof![
        (-2.0..6.0, 0.1..3.0f64)
            .prop_map(|(mu, sigma)| DistributionModel::lognormal(mu, sigma).unwrap()),
        (-0.8..1.0f64, -50.0..200.0, 0.5..150.0f64)
            .prop_map(|(sh, loc, sc)| DistributionModel::gev(sh, loc, sc).unwrap()),
        (-0.9..1.5f64, 0.1..200.0f64).prop_map(|(sh, sc)| DistributionModel::gpd(sh, sc).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn quantile_round_trips_through_cdf(model in arb_model(), p in 1e-4..0.9999f64) {
        let x = quantile(&model, p).unwrap();
        let back = cdf(&model, x);
        prop_assert!((back - p).abs() <= 1e-9, "family {}", model.family_name());
    }

    #[test]
    fn cdf_is_monotone_on_sorted_grids(
        model in arb_model(),
        mut xs in prop::collection::vec(-500.0..500.0f64, 2..40),
    ) {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev = f64::NEG_INFINITY;
        for &x in &xs {
            let f = cdf(&model, x);
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!(f >= prev);
            prev = f;
        }
    }

    #[test]
    fn hill_series_is_scale_invariant(
        values in prop::collection::vec(0.01..1e4f64, 5..80),
        scale in 0.001..1e3f64,
    ) {
        let base = Sample::new(values.clone(), "p").unwrap();
        let scaled = Sample::new(values.iter().map(|v| v * scale).collect(), "p").unwrap();
        let h1 = hill_series(&base).unwrap();
        let h2 = hill_series(&scaled).unwrap();
        prop_assert_eq!(h1.points.len(), h2.points.len());
        for (a, b) in h1.points.iter().zip(&h2.points) {
            prop_assert_eq!(a.0, b.0);
            prop_assert!((a.1 - b.1).abs() <= 1e-9 * a.1.abs().max(1.0));
        }
    }

    #[test]
    fn exceedances_reconstruct_the_filtered_observations(
        values in prop::collection::vec(0.1..1000.0f64, 1..60),
        threshold in 0.1..900.0f64,
    ) {
        let sample = Sample::new(values.clone(), "p").unwrap();
        match exceedances(&sample, threshold) {
            Ok(set) => {
                let expected: Vec<f64> =
                    values.iter().copied().filter(|&x| x > threshold).collect();
                prop_assert_eq!(set.n_exceed, expected.len());
                prop_assert_eq!(set.n_total, values.len());
                for (y, x) in set.exceedances.iter().zip(&expected) {
                    // Bit-exact when x and u share scale; one rounding
                    // otherwise.
                    prop_assert!((y + threshold - x).abs() <= f64::EPSILON * x.abs());
                }
            }
            Err(_) => {
                prop_assert!(values.iter().all(|&x| x <= threshold));
            }
        }
    }
}
