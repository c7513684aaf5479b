use lyochaos::linalg::Matrix;
use lyochaos::pce::{
    chance_probability, derive_seed, draw_rows, draw_samples, Distribution, EmpiricalDistribution, MultiIndexSet,
    UncertainInput,
};
use lyochaos::physics::{cake_resistance, desorption_rate_constant, radiative_sidewall_heat, saturation_pressure};
use proptest::prelude::*;

proptest! {
    #[test]
    fn saturation_pressure_increases(t in 200.0f64..319.0) {
        let lo = saturation_pressure(t).unwrap();
        let hi = saturation_pressure(t + 1.0).unwrap();
        prop_assert!(hi > lo && lo > 0.0);
    }

    #[test]
    fn cake_resistance_is_monotone_and_bounded(
        s in 0.0f64..0.05, ds in 0.0f64..0.01, r0 in 1e3f64..1e5, r1 in 1e3f64..1e6, r2 in 1e-4f64..0.1,
    ) {
        let a = cake_resistance(s, r0, r1, r2).unwrap();
        let b = cake_resistance(s + ds, r0, r1, r2).unwrap();
        prop_assert!(b >= a);
        prop_assert!(b <= r0 + r1);
    }

    #[test]
    fn sidewall_radiation_vanishes_at_equal_temperatures(t in 1.0f64..500.0, f1 in 0.0f64..1.0, area in 1e-6f64..1.0) {
        prop_assert_eq!(radiative_sidewall_heat(t, t, f1, area, 5.670374419e-8).unwrap(), 0.0);
    }

    #[test]
    fn desorption_rate_increases_with_temperature(t in 200.0f64..340.0, dt in 0.1f64..20.0) {
        let k1 = desorption_rate_constant(t, 0.4, 20000.0, 8.314).unwrap();
        let k2 = desorption_rate_constant(t + dt, 0.4, 20000.0, 8.314).unwrap();
        prop_assert!(k2 > k1);
    }

    #[test]
    fn chance_probability_is_monotone_in_threshold(
        values in prop::collection::vec(-10.0f64..10.0, 1..200), a in -12.0f64..12.0, b in -12.0f64..12.0,
    ) {
        let dist = EmpiricalDistribution::new(values).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(chance_probability(&dist, lo) <= chance_probability(&dist, hi));
        prop_assert!((0.0..=1.0).contains(&chance_probability(&dist, lo)));
    }

    #[test]
    fn quantiles_are_ordered_and_inside_the_range(
        values in prop::collection::vec(-1e3f64..1e3, 2..300), p in 0.0f64..1.0, q in 0.0f64..1.0,
    ) {
        let dist = EmpiricalDistribution::new(values).unwrap();
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let (ql, qh) = (dist.quantile(lo), dist.quantile(hi));
        prop_assert!(ql <= qh);
        prop_assert!(ql >= dist.min() && qh <= dist.max());
    }

    #[test]
    fn statistics_ignore_sample_order(values in prop::collection::vec(-1e3f64..1e3, 2..100), shift in 0usize..100) {
        let mut rotated = values.clone();
        let k = shift % values.len();
        rotated.rotate_left(k);
        let a = EmpiricalDistribution::new(values).unwrap();
        let b = EmpiricalDistribution::new(rotated).unwrap();
        prop_assert_eq!(a.sorted_samples(), b.sorted_samples());
        prop_assert_eq!(a.mean(), b.mean());
        prop_assert_eq!(a.variance(), b.variance());
    }

    #[test]
    fn ks_distance_is_a_symmetric_bounded_metric(
        x in prop::collection::vec(-5.0f64..5.0, 1..80), y in prop::collection::vec(-5.0f64..5.0, 1..80),
    ) {
        let a = EmpiricalDistribution::new(x).unwrap();
        let b = EmpiricalDistribution::new(y).unwrap();
        let d = a.ks_distance(&b);
        prop_assert_eq!(d, b.ks_distance(&a));
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(a.ks_distance(&a), 0.0);
    }

    #[test]
    fn sample_prefixes_are_shared(seed in any::<u64>(), n in 1usize..40, extra in 0usize..40) {
        let inputs = vec![
            UncertainInput::new("h", Distribution::Gaussian { mu: 15.0, sigma: 3.0 }).unwrap(),
            UncertainInput::new("R1", Distribution::Uniform { a: 1e7, b: 3e7 }).unwrap(),
        ];
        let small: Matrix<f64> = draw_samples(&inputs, n, seed);
        let large = draw_samples(&inputs, n + extra, seed);
        prop_assert_eq!(small.as_slice(), &large.as_slice()[..2 * n]);
        let tail = draw_rows(&inputs, n, extra, seed);
        prop_assert_eq!(tail.as_slice(), &large.as_slice()[2 * n..]);
    }

    #[test]
    fn samples_stay_in_their_support(seed in any::<u64>()) {
        let inputs = vec![
            UncertainInput::new("f_a", Distribution::Uniform { a: 0.3, b: 0.5 }).unwrap(),
            UncertainInput::new("cw_0", Distribution::Beta { alpha: 2.0, beta: 5.0, a: 0.05, b: 0.12 }).unwrap(),
            UncertainInput::new("h", Distribution::Gamma { shape: 3.0, rate: 0.2 }).unwrap(),
        ];
        let m: Matrix<f64> = draw_samples(&inputs, 64, seed);
        for r in 0..64 {
            let row = m.row(r);
            prop_assert!((0.3..=0.5).contains(&row[0]));
            prop_assert!((0.05..=0.12).contains(&row[1]));
            prop_assert!(row[2] >= 0.0);
        }
    }

    #[test]
    fn derived_seeds_differ_by_tag(seed in any::<u64>(), a in 0u64..1000, b in 0u64..1000) {
        prop_assume!(a != b);
        prop_assert_ne!(derive_seed(seed, a), derive_seed(seed, b));
    }

    #[test]
    fn multi_index_sets_are_graded(dim in 1usize..5, order in 0usize..5) {
        let set = MultiIndexSet::new(dim, order);
        let degrees: Vec<usize> = (0..set.len()).map(|i| set.total_degree(i)).collect();
        prop_assert!(degrees.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(degrees.iter().all(|&d| d <= order));
        let mut sorted = set.indices().to_vec();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), set.len());
    }
}
