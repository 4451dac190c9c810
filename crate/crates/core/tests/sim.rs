use statbandit::sim::{
    builtin_model, simulate, ModelDocument, SimulationRequest, MODEL_NAMES, VILAR_TRUE_THETA,
};
use statbandit::summaries::spectrum;

fn acf(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len();
    let m = xs.iter().sum::<f64>() / n as f64;
    let var: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    let cov: f64 = (0..n - lag).map(|i| (xs[i] - m) * (xs[i + lag] - m)).sum();
    cov / var
}

#[test]
fn birth_death_settles_on_poisson_moments() {
    let net = builtin_model("birth_death").unwrap();
    let req = SimulationRequest {
        theta: vec![10.0, 1.0],
        seed: 31,
        t_end: 4_000.0,
        n_grid_points: 4_001,
    };
    let traj = simulate(&net, &req).unwrap();
    let xs: Vec<f64> = traj.values_f64()[50..].to_vec();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    // unit-spaced samples of a process with unit relaxation time
    let rho = (-1.0f64).exp();
    let n_eff = n * (1.0 - rho) / (1.0 + rho);
    let se = (10.0 / n_eff).sqrt();
    assert!((mean - 10.0).abs() < 4.0 * se, "mean {mean}");
    assert!((var - 10.0).abs() < 1.5, "variance {var}");
}

#[test]
fn vilar_oscillates_at_reference_parameters() {
    let net = builtin_model("vilar_oscillator").unwrap();
    let req = SimulationRequest {
        theta: VILAR_TRUE_THETA.to_vec(),
        seed: 7,
        t_end: 200.0,
        n_grid_points: 1_000,
    };
    let xs = simulate(&net, &req).unwrap().values_f64();
    let spec = spectrum(&xs);
    let peak = (1..xs.len() / 2)
        .max_by(|&a, &b| spec[a].norm().total_cmp(&spec[b].norm()))
        .unwrap();
    let period = (xs.len() as f64 / peak as f64).round() as usize;
    assert!(
        peak >= 2,
        "dominant frequency is a trend, not an oscillation"
    );
    assert!(
        acf(&xs, period) > 0.2,
        "acf at period {period} is {}",
        acf(&xs, period)
    );
}

#[test]
fn builtin_models_survive_a_toml_round_trip() {
    for name in MODEL_NAMES {
        let net = builtin_model(name).unwrap();
        let text = ModelDocument::from_network(&net).to_toml();
        let back = ModelDocument::from_toml(&text).unwrap().build().unwrap();
        assert_eq!(back.n_species(), net.n_species(), "{name}");
        assert_eq!(back.n_reactions(), net.n_reactions(), "{name}");
        assert_eq!(back.parameter_names, net.parameter_names, "{name}");
        let theta = vec![0.5; net.n_parameters()];
        let req = SimulationRequest {
            theta,
            seed: 3,
            t_end: 5.0,
            n_grid_points: 20,
        };
        assert_eq!(
            simulate(&back, &req).unwrap(),
            simulate(&net, &req).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn grid_values_hold_between_events() {
    let net = builtin_model("birth_death").unwrap();
    let req = SimulationRequest {
        theta: vec![0.0, 0.0],
        seed: 1,
        t_end: 10.0,
        n_grid_points: 11,
    };
    let traj = simulate(&net, &req).unwrap();
    assert_eq!(traj.values, vec![0; 11]);
    assert_eq!(traj.times.first(), Some(&0.0));
    assert_eq!(traj.times.last(), Some(&10.0));
}
