use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::prior::Prior;
use crate::bandit::{Bandit, BanditConfig, Phase, RewardLedger};
use crate::error::{Error, Result};
use crate::metric::{
    l2_combine, reward, NormalizationBuilder, NormalizationState, ObservedSummary,
};
use crate::rng::{stream_rng, stream_seed, Stream};
use crate::sim::{simulate, ReactionNetwork, SimulationRequest};
use crate::summaries::StatisticPool;

/// A stochastic model mapping parameters and a seed to one output series.
pub trait Simulator: Sync {
    fn parameter_names(&self) -> Vec<String>;

    fn simulate(&self, theta: &[f64], seed: u64) -> Result<Vec<f64>>;
}

/// Reaction network simulated with the SSA on a fixed output grid.
#[derive(Debug, Clone)]
pub struct SsaSimulator {
    pub network: ReactionNetwork,
    pub t_end: f64,
    pub n_grid_points: usize,
}

impl Simulator for SsaSimulator {
    fn parameter_names(&self) -> Vec<String> {
        self.network.parameter_names.clone()
    }

    fn simulate(&self, theta: &[f64], seed: u64) -> Result<Vec<f64>> {
        let req = SimulationRequest {
            theta: theta.to_vec(),
            seed,
            t_end: self.t_end,
            n_grid_points: self.n_grid_points,
        };
        Ok(simulate(&self.network, &req)?.values_f64())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Accepted-sample target.
    pub n_accept: usize,
    /// Threshold on the normalized distance.
    pub tau: f64,
    pub max_simulations: usize,
    pub seed: u64,
    /// Simulations drawn ahead of the sequential accept/select loop. Draws
    /// are counter-seeded, so results do not depend on this value.
    #[serde(default = "default_batch")]
    pub batch_size: usize,
}

fn default_batch() -> usize {
    rayon::current_num_threads()
}

impl RunConfig {
    pub fn new(n_accept: usize, tau: f64, max_simulations: usize, seed: u64) -> Self {
        Self {
            n_accept,
            tau,
            max_simulations,
            seed,
            batch_size: default_batch(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_accept == 0 {
            return Err(Error::Config("n_accept must be at least 1".into()));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::Config(format!(
                "tau must lie in (0, 1], got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    Single,
    L2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampler {
    Dynamic {
        bandit: BanditConfig,
    },
    Static {
        statistics: Vec<usize>,
        combine: Combine,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptedSample {
    pub theta: Vec<f64>,
    pub iteration: usize,
    /// Statistic(s) the acceptance decision was based on.
    pub arms: Vec<usize>,
    pub distance: f64,
    pub sim_seed: u64,
}

/// Wall-clock breakdown, in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub simulation: f64,
    pub evaluation: f64,
    /// Arm selection plus ledger updates only.
    pub selection: f64,
    pub total: f64,
}

impl Timings {
    pub fn other(&self) -> f64 {
        (self.total - self.simulation - self.evaluation - self.selection).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceRun {
    pub sampler: Sampler,
    pub config: RunConfig,
    pub accepted: Vec<AcceptedSample>,
    pub total_simulations: usize,
    /// `false` when the simulation budget ran out before `n_accept`.
    pub completed: bool,
    #[serde(skip)]
    pub ledger: Option<RewardLedger>,
    pub timings: Timings,
}

impl InferenceRun {
    pub fn acceptance_rate(&self) -> f64 {
        if self.total_simulations == 0 {
            0.0
        } else {
            self.accepted.len() as f64 / self.total_simulations as f64
        }
    }
}

struct Draw {
    theta: Vec<f64>,
    sim_seed: u64,
    series: Vec<f64>,
}

fn draw(sim: &dyn Simulator, prior: &Prior, seed: u64, m: usize) -> Result<Draw> {
    let theta = prior.sample(&mut stream_rng(seed, Stream::Prior, m as u64));
    let sim_seed = stream_seed(seed, Stream::Simulation, m as u64);
    let series = sim.simulate(&theta, sim_seed)?;
    Ok(Draw {
        theta,
        sim_seed,
        series,
    })
}

fn check_inputs(
    sim: &dyn Simulator,
    pool: &StatisticPool,
    prior: &Prior,
    observed: &ObservedSummary,
    norm: &NormalizationState,
) -> Result<()> {
    prior.validate()?;
    let dim = sim.parameter_names().len();
    if prior.dim() != dim {
        return Err(Error::Config(format!(
            "prior has dimension {}, model expects {dim}",
            prior.dim()
        )));
    }
    if observed.len() != pool.len() {
        return Err(Error::Input(format!(
            "observed summary has {} entries, pool has {}",
            observed.len(),
            pool.len()
        )));
    }
    if norm.calibration_size == 0 || norm.len() != pool.len() {
        return Err(Error::State(
            "normalization is not calibrated for this pool".into(),
        ));
    }
    Ok(())
}

/// Shared rejection loop; `step` turns one simulated draw into
/// `(arms, distance)` for the acceptance test.
fn rejection_loop<F>(
    sim: &dyn Simulator,
    prior: &Prior,
    run: &RunConfig,
    timings: &mut Timings,
    mut step: F,
) -> Result<(Vec<AcceptedSample>, usize)>
where
    F: FnMut(usize, &Draw, &mut Timings) -> Result<(Vec<usize>, f64)>,
{
    let mut accepted = Vec::new();
    let mut m = 0usize;
    let batch = run.batch_size.max(1);
    while accepted.len() < run.n_accept && m < run.max_simulations {
        let end = (m + batch).min(run.max_simulations);
        let t0 = Instant::now();
        let draws: Vec<Result<Draw>> = if end - m == 1 {
            vec![draw(sim, prior, run.seed, m)]
        } else {
            (m..end)
                .into_par_iter()
                .map(|i| draw(sim, prior, run.seed, i))
                .collect()
        };
        timings.simulation += t0.elapsed().as_secs_f64();
        for d in draws {
            if accepted.len() >= run.n_accept {
                break;
            }
            let d = d?;
            let (arms, distance) = step(m, &d, timings)?;
            if distance <= run.tau {
                accepted.push(AcceptedSample {
                    theta: d.theta,
                    iteration: m,
                    arms,
                    distance,
                    sim_seed: d.sim_seed,
                });
            }
            m += 1;
        }
    }
    Ok((accepted, m))
}

/// Rejection sampling where a bandit chooses the statistic each iteration.
#[allow(clippy::too_many_arguments)]
pub fn run_dynamic(
    sim: &dyn Simulator,
    pool: &StatisticPool,
    prior: &Prior,
    observed: &ObservedSummary,
    norm: &NormalizationState,
    bandit_cfg: &BanditConfig,
    run: &RunConfig,
) -> Result<InferenceRun> {
    let started = Instant::now();
    run.validate()?;
    check_inputs(sim, pool, prior, observed, norm)?;
    let k = pool.len();
    let mut bandit = Bandit::new(
        BanditConfig {
            seed: stream_seed(run.seed, Stream::Bandit, bandit_cfg.seed),
            ..bandit_cfg.clone()
        },
        k,
    )?;
    let mut ledger = RewardLedger::new(k);
    let all_arms: Vec<usize> = (0..k).collect();
    let mut timings = Timings::default();

    let (accepted, total) = rejection_loop(sim, prior, run, &mut timings, |m, d, t| {
        let t0 = Instant::now();
        let sel = bandit.select(&ledger, m)?;
        t.selection += t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let arms: &[usize] = if sel.phase == Phase::Exploration && bandit_cfg.record_all {
            &all_arms
        } else {
            std::slice::from_ref(&sel.arm)
        };
        let values = if arms.len() == k {
            pool.evaluate(&d.series)?
        } else {
            pool.evaluate_subset(&d.series, arms)?
        };
        let mut rewards = Vec::with_capacity(arms.len());
        let mut selected_distance = f64::NAN;
        for (&arm, &v) in arms.iter().zip(&values) {
            let dist = norm.distance(arm, v, observed.per_statistic[arm])?;
            if arm == sel.arm {
                selected_distance = dist;
            }
            rewards.push((arm, reward(dist)));
        }
        t.evaluation += t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        ledger.record(m, sel.arm, sel.phase, &rewards)?;
        t.selection += t0.elapsed().as_secs_f64();
        Ok((vec![sel.arm], selected_distance))
    })?;

    timings.total = started.elapsed().as_secs_f64();
    Ok(InferenceRun {
        sampler: Sampler::Dynamic {
            bandit: bandit_cfg.clone(),
        },
        config: run.clone(),
        completed: accepted.len() >= run.n_accept,
        accepted,
        total_simulations: total,
        ledger: Some(ledger),
        timings,
    })
}

fn static_distance(
    norm: &NormalizationState,
    observed: &ObservedSummary,
    statistics: &[usize],
    values: &[f64],
    combine: Combine,
) -> Result<f64> {
    let ds = statistics
        .iter()
        .zip(values)
        .map(|(&i, &v)| norm.distance(i, v, observed.per_statistic[i]))
        .collect::<Result<Vec<_>>>()?;
    match combine {
        Combine::Single => Ok(ds[0]),
        Combine::L2 => l2_combine(&ds),
    }
}

/// Rejection sampling with a fixed statistic or a fixed L2-combined set.
#[allow(clippy::too_many_arguments)]
pub fn run_static(
    sim: &dyn Simulator,
    pool: &StatisticPool,
    statistics: &[usize],
    combine: Combine,
    prior: &Prior,
    observed: &ObservedSummary,
    norm: &NormalizationState,
    run: &RunConfig,
) -> Result<InferenceRun> {
    let started = Instant::now();
    run.validate()?;
    check_inputs(sim, pool, prior, observed, norm)?;
    if statistics.is_empty() {
        return Err(Error::Config(
            "static sampler needs at least one statistic".into(),
        ));
    }
    if combine == Combine::Single && statistics.len() != 1 {
        return Err(Error::Config(format!(
            "single-statistic sampler given {} statistics",
            statistics.len()
        )));
    }
    if let Some(&bad) = statistics.iter().find(|&&i| i >= pool.len()) {
        return Err(Error::Config(format!("statistic index {bad} out of range")));
    }
    let mut timings = Timings::default();
    let (accepted, total) = rejection_loop(sim, prior, run, &mut timings, |_, d, t| {
        let t0 = Instant::now();
        let values = pool.evaluate_subset(&d.series, statistics)?;
        let dist = static_distance(norm, observed, statistics, &values, combine)?;
        t.evaluation += t0.elapsed().as_secs_f64();
        Ok((statistics.to_vec(), dist))
    })?;
    timings.total = started.elapsed().as_secs_f64();
    Ok(InferenceRun {
        sampler: Sampler::Static {
            statistics: statistics.to_vec(),
            combine,
        },
        config: run.clone(),
        completed: accepted.len() >= run.n_accept,
        accepted,
        total_simulations: total,
        ledger: None,
        timings,
    })
}

/// Freezes per-statistic min/max raw distances from `n` prior-predictive
/// simulations. Draws use their own substreams of `seed`.
pub fn calibrate(
    sim: &dyn Simulator,
    pool: &StatisticPool,
    prior: &Prior,
    observed: &ObservedSummary,
    n: usize,
    seed: u64,
) -> Result<NormalizationState> {
    if n == 0 {
        return Err(Error::Config(
            "calibration needs at least one simulation".into(),
        ));
    }
    if observed.len() != pool.len() {
        return Err(Error::Input("observed summary does not match pool".into()));
    }
    let rows: Vec<Result<Vec<f64>>> = (0..n as u64)
        .into_par_iter()
        .map(|c| {
            let theta = prior.sample(&mut stream_rng(seed, Stream::CalibrationPrior, c));
            let series =
                sim.simulate(&theta, stream_seed(seed, Stream::CalibrationSimulation, c))?;
            let values = pool.evaluate(&series)?;
            values
                .iter()
                .zip(&observed.per_statistic)
                .map(|(&s, &o)| crate::metric::raw_distance(s, o))
                .collect()
        })
        .collect();
    let mut b = NormalizationBuilder::new(pool.len());
    for r in rows {
        b.observe(&r?)?;
    }
    Ok(b.finish())
}

/// Recomputes the acceptance distance of a stored sample from its
/// parameters and simulator seed.
pub fn replay_distance(
    sim: &dyn Simulator,
    pool: &StatisticPool,
    observed: &ObservedSummary,
    norm: &NormalizationState,
    sample: &AcceptedSample,
) -> Result<f64> {
    let series = sim.simulate(&sample.theta, sample.sim_seed)?;
    let values = pool.evaluate_subset(&series, &sample.arms)?;
    let combine = if sample.arms.len() == 1 {
        Combine::Single
    } else {
        Combine::L2
    };
    static_distance(norm, observed, &sample.arms, &values, combine)
}

/// Mean of the accepted parameter vectors.
pub fn posterior_estimate(run: &InferenceRun) -> Result<Vec<f64>> {
    let first = run
        .accepted
        .first()
        .ok_or_else(|| Error::Estimation("no accepted samples".into()))?;
    let mut acc = vec![0.0; first.theta.len()];
    for s in &run.accepted {
        for (a, t) in acc.iter_mut().zip(&s.theta) {
            *a += t;
        }
    }
    let n = run.accepted.len() as f64;
    Ok(acc.into_iter().map(|a| a / n).collect())
}

/// Mean absolute error over parameter dimensions.
pub fn mae(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() || estimate.is_empty() {
        return Err(Error::Input(format!(
            "dimension mismatch: estimate {} vs truth {}",
            estimate.len(),
            truth.len()
        )));
    }
    Ok(estimate
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t).abs())
        .sum::<f64>()
        / truth.len() as f64)
}
