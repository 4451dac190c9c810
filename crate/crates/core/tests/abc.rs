use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use statbandit::abc::{
    calibrate, mae, posterior_estimate, replay_distance, run_dynamic, run_static, sample_prior,
    Combine, Prior, RunConfig, Simulator,
};
use statbandit::bandit::{BanditConfig, Strategy};
use statbandit::metric::ObservedSummary;
use statbandit::sim::VILAR_TRUE_THETA;
use statbandit::summaries::StatisticPool;

/// Gaussian noise around a level and a linear trend.
struct Trend;

impl Simulator for Trend {
    fn parameter_names(&self) -> Vec<String> {
        vec!["level".into(), "slope".into()]
    }

    fn simulate(&self, theta: &[f64], seed: u64) -> statbandit::Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 1.0).unwrap();
        Ok((0..40)
            .map(|i| theta[0] + theta[1] * i as f64 + noise.sample(&mut rng))
            .collect())
    }
}

struct Setup {
    pool: StatisticPool,
    prior: Prior,
    observed: ObservedSummary,
    norm: statbandit::metric::NormalizationState,
}

fn setup() -> Setup {
    let pool = StatisticPool::from_ids(&[
        "mean",
        "variance",
        "autocorrelation__lag_1",
        "maximum",
        "approximate_entropy__m_2__r_0.3",
    ])
    .unwrap();
    let prior = Prior::uniform(vec![-5.0, -0.5], vec![5.0, 0.5]).unwrap();
    let obs: Vec<Vec<f64>> = (0..4)
        .map(|s| Trend.simulate(&[1.0, 0.1], 900 + s).unwrap())
        .collect();
    let observed = ObservedSummary::from_series(&pool, &obs).unwrap();
    let norm = calibrate(&Trend, &pool, &prior, &observed, 50, 17).unwrap();
    Setup {
        pool,
        prior,
        observed,
        norm,
    }
}

fn dynamic(s: &Setup, run: &RunConfig) -> statbandit::abc::InferenceRun {
    let cfg = BanditConfig::new(Strategy::EpsilonFirst, 0.3, run.n_accept).unwrap();
    run_dynamic(&Trend, &s.pool, &s.prior, &s.observed, &s.norm, &cfg, run).unwrap()
}

#[test]
fn prior_draws_centre_on_box_midpoint() {
    let prior = Prior::vilar();
    let n = 10_000;
    let draws: Vec<Vec<f64>> = (0..n).map(|s| sample_prior(&prior, s)).collect();
    let Prior::Uniform { lower, upper } = &prior else {
        unreachable!()
    };
    for d in 0..prior.dim() {
        let mean = draws.iter().map(|t| t[d]).sum::<f64>() / n as f64;
        let width = upper[d] - lower[d];
        let se = width / 12f64.sqrt() / (n as f64).sqrt();
        let mid = 0.5 * (lower[d] + upper[d]);
        assert!((mean - mid).abs() < 4.0 * se, "dim {d}: {mean} vs {mid}");
        assert!(draws.iter().all(|t| prior.contains(t)));
    }
}

#[test]
fn mae_examples() {
    assert_eq!(mae(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
    assert_eq!(mae(&[0.0, 0.0], &[1.0, -3.0]).unwrap(), 2.0);
    assert!(mae(&[1.0], &[1.0, 2.0]).is_err());
    // midpoints of the search box against the reference parameters:
    // |400-500| + |0.5-0.01| + |5.5-5| + |6.5-10| + |0.25-0.2| = 104.54
    let m = mae(&Prior::vilar().midpoint(), &VILAR_TRUE_THETA).unwrap();
    assert!((m - 104.54 / 15.0).abs() < 1e-12, "{m}");
}

#[test]
fn accepted_samples_replay_to_their_distance() {
    let s = setup();
    let run = dynamic(&s, &RunConfig::new(15, 0.1, 2_000, 5));
    assert!(run.completed);
    for a in &run.accepted {
        assert!(s.prior.contains(&a.theta));
        let d = replay_distance(&Trend, &s.pool, &s.observed, &s.norm, a).unwrap();
        assert_eq!(d.to_bits(), a.distance.to_bits());
        assert!(d <= 0.1);
    }
    let stat = run_static(
        &Trend,
        &s.pool,
        &[0, 2],
        Combine::L2,
        &s.prior,
        &s.observed,
        &s.norm,
        &RunConfig::new(10, 0.2, 2_000, 5),
    )
    .unwrap();
    for a in &stat.accepted {
        let d = replay_distance(&Trend, &s.pool, &s.observed, &s.norm, a).unwrap();
        assert_eq!(d.to_bits(), a.distance.to_bits());
    }
}

#[test]
fn posterior_estimate_is_the_batch_mean() {
    let s = setup();
    let run = dynamic(&s, &RunConfig::new(12, 0.2, 2_000, 9));
    let est = posterior_estimate(&run).unwrap();
    for (d, got) in est.iter().enumerate() {
        let want = run.accepted.iter().map(|a| a.theta[d]).sum::<f64>() / run.accepted.len() as f64;
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn budget_caps_simulations() {
    let s = setup();
    for max in [1, 7, 40] {
        let run = dynamic(&s, &RunConfig::new(1_000, 0.01, max, 3));
        assert!(!run.completed);
        assert_eq!(run.total_simulations, max);
        assert!(run.accepted.len() < 1_000);
    }
}

#[test]
fn unit_threshold_accepts_everything() {
    let s = setup();
    let run = dynamic(&s, &RunConfig::new(25, 1.0, 1_000, 3));
    assert!(run.completed);
    assert_eq!(run.total_simulations, 25);
}

#[test]
fn runs_are_deterministic_and_batch_independent() {
    let s = setup();
    let mut a = RunConfig::new(10, 0.15, 3_000, 44);
    a.batch_size = 1;
    let mut b = a.clone();
    b.batch_size = 7;
    let ra = dynamic(&s, &a);
    let rb = dynamic(&s, &b);
    assert_eq!(ra.accepted, rb.accepted);
    assert_eq!(ra.total_simulations, rb.total_simulations);
    assert_eq!(ra.ledger, rb.ledger);
}

#[test]
fn mismatched_inputs_are_rejected() {
    let s = setup();
    let wrong = Prior::uniform(vec![0.0], vec![1.0]).unwrap();
    let cfg = BanditConfig::new(Strategy::EpsilonFirst, 0.3, 5).unwrap();
    let run = RunConfig::new(5, 0.1, 100, 1);
    assert!(run_dynamic(&Trend, &s.pool, &wrong, &s.observed, &s.norm, &cfg, &run).is_err());
    assert!(run_static(
        &Trend,
        &s.pool,
        &[0, 1],
        Combine::Single,
        &s.prior,
        &s.observed,
        &s.norm,
        &run
    )
    .is_err());
    assert!(run_static(
        &Trend,
        &s.pool,
        &[9],
        Combine::Single,
        &s.prior,
        &s.observed,
        &s.norm,
        &run
    )
    .is_err());
}
