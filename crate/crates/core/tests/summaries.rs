use proptest::prelude::*;
use statbandit::summaries::{catalog, lookup, spectrum, standard_pool, StatisticPool};

fn series() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 2..120)
}

fn stat(id: &str, xs: &[f64]) -> f64 {
    lookup(id).unwrap().evaluate(xs).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn every_statistic_is_finite_and_pure(xs in series()) {
        for s in catalog() {
            let a = s.evaluate(&xs).unwrap();
            let b = s.evaluate(&xs).unwrap();
            prop_assert!(a.is_finite(), "{} gave {}", s.id, a);
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn shift_moves_mean_but_not_variance(xs in series(), c in -1e3f64..1e3) {
        let ys: Vec<f64> = xs.iter().map(|x| x + c).collect();
        prop_assert!(close(stat("mean", &ys), stat("mean", &xs) + c, 1e-9));
        prop_assert!(close(stat("variance", &ys), stat("variance", &xs), 1e-6));
    }

    #[test]
    fn autocorrelation_ignores_positive_scale(xs in series(), a in 0.01f64..100.0, lag in 1usize..10) {
        prop_assume!(xs.iter().any(|&x| x != xs[0]));
        let ys: Vec<f64> = xs.iter().map(|x| a * x).collect();
        let id = format!("autocorrelation__lag_{lag}");
        prop_assert!(close(stat(&id, &ys), stat(&id, &xs), 1e-9));
    }

    #[test]
    fn parseval_holds(xs in series()) {
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let centred: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
        let spec = spectrum(&xs);
        let energy: f64 = spec.iter().skip(1).map(|c| c.norm_sqr()).sum::<f64>() / xs.len() as f64;
        prop_assert!((energy - centred).abs() <= 1e-9 * centred.max(1e-12));
    }

    #[test]
    fn mass_quantile_is_monotone(xs in series()) {
        let qs = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
        let vals: Vec<f64> = qs.iter().map(|q| stat(&format!("index_mass_quantile__q_{q}"), &xs)).collect();
        for w in vals.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn pool_matches_individual_evaluation(xs in series(), seed in any::<u64>()) {
        let pool = standard_pool(25, seed).unwrap();
        let all = pool.evaluate(&xs).unwrap();
        for (s, v) in pool.statistics().iter().zip(&all) {
            prop_assert_eq!(s.evaluate(&xs).unwrap().to_bits(), v.to_bits());
        }
    }
}

#[test]
fn constant_series_collapses_moments() {
    let c = [4.5; 64];
    let pool =
        StatisticPool::from_ids(&["mean", "median", "variance", "standard_deviation"]).unwrap();
    assert_eq!(pool.evaluate(&c).unwrap(), vec![4.5, 4.5, 0.0, 0.0]);
    for s in catalog()
        .iter()
        .filter(|s| s.id.contains("attr_abs") && !s.id.contains("bin_0_"))
    {
        assert_eq!(s.evaluate(&c).unwrap(), 0.0, "{}", s.id);
    }
}

#[test]
fn quantile_matches_sort_oracle() {
    let xs: Vec<f64> = (0..101).map(|i| ((i * 37) % 101) as f64).collect();
    // sorted values are 0..=100, so the q-quantile is exactly 100q
    for q in [0.1, 0.5, 0.9] {
        let v = stat(&format!("quantile__q_{q}"), &xs);
        assert!((v - 100.0 * q).abs() < 1e-9, "q={q}: {v}");
    }
}
