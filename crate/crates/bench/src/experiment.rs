//! Observed-data generation and the (method, K, repetition) sweep.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use statbandit::abc::{
    calibrate, mae, posterior_estimate, run_dynamic, run_static, write_accepted_csv, Combine,
    InferenceRun, Prior, RunConfig, RunDocument, Simulator, SsaSimulator,
};
use statbandit::bandit::{rank_arms, BanditConfig, Strategy};
use statbandit::metric::{NormalizationState, ObservedSummary};
use statbandit::rng::{stream_seed, Stream};
use statbandit::sim::{
    builtin_model, simulate, ModelDocument, SimulationRequest, Trajectory, VILAR_TRUE_THETA,
};
use statbandit::summaries::{standard_pool, StatisticPool};

use crate::config::{ExperimentConfig, Method, MethodSettings};
use crate::report::{Report, ReportRow};

/// Simulator, prior and ground truth resolved from a config.
pub struct Problem {
    pub simulator: SsaSimulator,
    pub prior: Prior,
    pub truth: Vec<f64>,
}

impl Problem {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let mut network = match (&cfg.model, &cfg.model_file) {
            (Some(name), None) => builtin_model(name)?,
            (None, Some(file)) => {
                let path = cfg.base_dir.join(file);
                let text = fs::read_to_string(&path)
                    .with_context(|| format!("reading model {}", path.display()))?;
                ModelDocument::from_toml(&text)?.build()?
            }
            _ => bail!("exactly one of `model` and `model_file` must be set"),
        };
        if let Some(obs) = &cfg.observable {
            network = network.with_observable(obs)?;
        }
        let is_vilar = network.name == "vilar_oscillator";
        let prior = match (&cfg.prior, is_vilar) {
            (Some(p), _) => p.clone(),
            (None, true) => Prior::vilar(),
            (None, false) => bail!("model `{}` has no default prior; set [prior]", network.name),
        };
        let truth = match (&cfg.observed.theta, is_vilar) {
            (Some(t), _) => t.clone(),
            (None, true) => VILAR_TRUE_THETA.to_vec(),
            (None, false) => bail!("model `{}` needs observed.theta", network.name),
        };
        prior.validate()?;
        network.validate_theta(&truth)?;
        if prior.dim() != network.n_parameters() {
            bail!(
                "prior dimension {} does not match {} parameters",
                prior.dim(),
                network.n_parameters()
            );
        }
        Ok(Self {
            simulator: SsaSimulator {
                network,
                t_end: cfg.observed.t_end,
                n_grid_points: cfg.observed.n_grid_points,
            },
            prior,
            truth,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ObservedManifest {
    model: String,
    observable: String,
    theta: Vec<f64>,
    seed: u64,
    n_trajectories: usize,
    n_grid_points: usize,
    t_end: f64,
}

fn observed_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_dir().join("observed")
}

fn manifest(cfg: &ExperimentConfig, problem: &Problem) -> ObservedManifest {
    let net = &problem.simulator.network;
    ObservedManifest {
        model: net.name.clone(),
        observable: net.species[net.observable].name.clone(),
        theta: problem.truth.clone(),
        seed: cfg
            .observed
            .seed
            .unwrap_or_else(|| stream_seed(cfg.seed, Stream::Observed, 0)),
        n_trajectories: cfg.observed.n_trajectories,
        n_grid_points: cfg.observed.n_grid_points,
        t_end: cfg.observed.t_end,
    }
}

/// Simulates the observed trajectories at the true parameters and writes
/// them to `<output>/observed/`.
pub fn generate_observed(cfg: &ExperimentConfig) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    let problem = Problem::from_config(cfg)?;
    let m = manifest(cfg, &problem);
    let net = &problem.simulator.network;
    let trajectories = (0..m.n_trajectories as u64)
        .map(|i| {
            let req = SimulationRequest {
                theta: m.theta.clone(),
                seed: stream_seed(m.seed, Stream::Observed, i),
                t_end: m.t_end,
                n_grid_points: m.n_grid_points,
            };
            simulate(net, &req)
                .with_context(|| format!("simulating observed trajectory {i} of `{}`", net.name))
        })
        .collect::<Result<Vec<_>>>()?;

    let dir = observed_dir(cfg);
    if dir.exists() {
        fs::remove_dir_all(&dir)?;
    }
    fs::create_dir_all(&dir)?;
    for (i, t) in trajectories.iter().enumerate() {
        t.write_csv(fs::File::create(dir.join(format!("traj_{i:04}.csv")))?)?;
    }
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&m)?)?;
    Ok(trajectories)
}

/// Reads previously generated observed data, or `None` if absent or
/// generated under different settings.
pub fn load_observed(cfg: &ExperimentConfig) -> Result<Option<Vec<Trajectory>>> {
    let problem = Problem::from_config(cfg)?;
    let dir = observed_dir(cfg);
    let Ok(text) = fs::read_to_string(dir.join("manifest.json")) else {
        return Ok(None);
    };
    let stored: ObservedManifest = serde_json::from_str(&text)?;
    if stored != manifest(cfg, &problem) {
        return Ok(None);
    }
    let trajectories = (0..stored.n_trajectories)
        .map(|i| {
            let path = dir.join(format!("traj_{i:04}.csv"));
            Ok(Trajectory::read_csv(
                fs::File::open(&path).with_context(|| path.display().to_string())?,
            )?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(trajectories))
}

struct Cell<'a> {
    problem: &'a Problem,
    pool: StatisticPool,
    observed: ObservedSummary,
    norm: NormalizationState,
    seed: u64,
    dir: PathBuf,
}

impl Cell<'_> {
    fn run_cfg(&self, s: &MethodSettings) -> RunConfig {
        RunConfig::new(s.n_accept, s.tau, s.max_simulations, self.seed)
    }

    fn bandit(&self, strategy: Strategy, s: &MethodSettings) -> Result<BanditConfig> {
        let mut b = BanditConfig::new(strategy, s.epsilon, s.n_accept)?;
        b.record_all = s.record_all;
        Ok(b)
    }

    fn dynamic(&self, strategy: Strategy, s: &MethodSettings) -> Result<InferenceRun> {
        Ok(run_dynamic(
            &self.problem.simulator,
            &self.pool,
            &self.problem.prior,
            &self.observed,
            &self.norm,
            &self.bandit(strategy, s)?,
            &self.run_cfg(s),
        )?)
    }

    fn fixed(&self, stats: &[usize], combine: Combine, s: &MethodSettings) -> Result<InferenceRun> {
        Ok(run_static(
            &self.problem.simulator,
            &self.pool,
            stats,
            combine,
            &self.problem.prior,
            &self.observed,
            &self.norm,
            &self.run_cfg(s),
        )?)
    }

    fn save(&self, name: &str, run: &InferenceRun) -> Result<()> {
        let dir = self.dir.join(name);
        fs::create_dir_all(&dir)?;
        let names = self.problem.simulator.parameter_names();
        let doc = RunDocument::new(run, names.clone(), &self.pool, &self.observed, &self.norm);
        fs::write(dir.join("run.json"), doc.to_json())?;
        write_accepted_csv(run, &names, fs::File::create(dir.join("accepted.csv"))?)?;
        if let Some(l) = &run.ledger {
            l.write_csv(fs::File::create(dir.join("ledger.csv"))?)?;
        }
        Ok(())
    }
}

fn arm_order(run: &InferenceRun) -> Result<Vec<usize>> {
    let ledger = run
        .ledger
        .as_ref()
        .ok_or_else(|| anyhow!("run has no ledger"))?;
    Ok(rank_arms(ledger)?.into_iter().map(|r| r.arm).collect())
}

fn row_for(
    method: Method,
    k: usize,
    rep: usize,
    problem: &Problem,
    run: &InferenceRun,
) -> ReportRow {
    let mae = posterior_estimate(run)
        .ok()
        .and_then(|est| mae(&est, &problem.truth).ok());
    ReportRow {
        method,
        k,
        repetition: rep,
        mae,
        total_simulations: Some(run.total_simulations),
        accepted: Some(run.accepted.len()),
        completed: Some(run.completed),
        wall_time_total: Some(run.timings.total),
        wall_time_selection: Some(run.timings.selection),
        error: None,
    }
}

fn setup_cell<'a>(
    cfg: &ExperimentConfig,
    problem: &'a Problem,
    series: &[Vec<f64>],
    k: usize,
    rep: usize,
) -> Result<Cell<'a>> {
    let seed = stream_seed(cfg.seed, Stream::Cell, rep as u64);
    let pool = match &cfg.pool {
        Some(ids) => StatisticPool::from_ids(ids)?,
        None => standard_pool(k, stream_seed(seed, Stream::Pool, 0))?,
    };
    if pool.len() != k {
        bail!(
            "configured pool has {} statistics but pool size is {k}",
            pool.len()
        );
    }
    let observed = ObservedSummary::from_series(&pool, series)?;
    let norm = calibrate(
        &problem.simulator,
        &pool,
        &problem.prior,
        &observed,
        cfg.calibration_size,
        seed,
    )?;
    Ok(Cell {
        problem,
        pool,
        observed,
        norm,
        seed,
        dir: cfg
            .output_dir()
            .join("runs")
            .join(format!("K{k}"))
            .join(format!("rep{rep}")),
    })
}

/// Runs every configured cell and writes `report.{csv,json,txt}` plus one
/// directory per cell under `<output>/runs/`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let problem = Problem::from_config(cfg)?;
    let trajectories = match load_observed(cfg)? {
        Some(t) => t,
        None => generate_observed(cfg)?,
    };
    let series: Vec<Vec<f64>> = trajectories.iter().map(Trajectory::values_f64).collect();
    let out = cfg.output_dir();
    let runs_dir = out.join("runs");
    if runs_dir.exists() {
        fs::remove_dir_all(&runs_dir)?;
    }

    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();

    let mut rows = Vec::new();
    for rep in 0..cfg.repetitions {
        for &k in &cfg.pool_sizes {
            let cell = match setup_cell(cfg, &problem, &series, k, rep) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("K={k} rep={rep}: setup failed: {e:#}");
                    rows.extend(
                        methods
                            .iter()
                            .map(|&m| ReportRow::failed(m, k, rep, format!("{e:#}"))),
                    );
                    continue;
                }
            };
            let mut ranking: Option<Vec<usize>> = None;
            for &method in &methods {
                let s = cfg.settings_for(method);
                let result = (|| -> Result<InferenceRun> {
                    let run = match method {
                        Method::MabEpsFirst => {
                            let run = cell.dynamic(Strategy::EpsilonFirst, &s)?;
                            ranking = Some(arm_order(&run)?);
                            run
                        }
                        Method::MabEpsGreedy => cell.dynamic(Strategy::EpsilonGreedy, &s)?,
                        Method::UniformRandom => cell.dynamic(Strategy::UniformRandom, &s)?,
                        Method::StaticSingle | Method::StaticL2Topk => {
                            if ranking.is_none() {
                                let base = cfg.settings_for(Method::MabEpsFirst);
                                let r = cell.dynamic(Strategy::EpsilonFirst, &base)?;
                                cell.save("ranking", &r)?;
                                ranking = Some(arm_order(&r)?);
                            }
                            let order = ranking.as_ref().expect("ranking computed above");
                            if method == Method::StaticSingle {
                                cell.fixed(&order[..1], Combine::Single, &s)?
                            } else {
                                let top = s.k.min(order.len());
                                cell.fixed(&order[..top], Combine::L2, &s)?
                            }
                        }
                        Method::StaticRandomK => {
                            let stats = cell.pool.random_subset(s.k.min(k), cell.seed)?;
                            let combine = if stats.len() == 1 {
                                Combine::Single
                            } else {
                                Combine::L2
                            };
                            cell.fixed(&stats, combine, &s)?
                        }
                    };
                    cell.save(method.as_str(), &run)?;
                    Ok(run)
                })();
                let row = match result {
                    Ok(run) => row_for(method, k, rep, &problem, &run),
                    Err(e) => ReportRow::failed(method, k, rep, format!("{e:#}")),
                };
                eprintln!(
                    "{method} K={k} rep={rep}: mae={} sims={} accepted={}{}",
                    row.mae.map_or("-".into(), |v| format!("{v:.3}")),
                    row.total_simulations.map_or("-".into(), |v| v.to_string()),
                    row.accepted.map_or("-".into(), |v| v.to_string()),
                    row.error
                        .as_ref()
                        .map_or(String::new(), |e| format!(" error: {e}")),
                );
                rows.push(row);
            }
        }
    }
    let report = Report::new(cfg.clone(), rows);
    report.write(&out)?;
    Ok(report)
}

/// Directory of one cell's outputs.
pub fn cell_dir(run_dir: &Path, method: Method, k: usize, rep: usize) -> PathBuf {
    run_dir
        .join("runs")
        .join(format!("K{k}"))
        .join(format!("rep{rep}"))
        .join(method.as_str())
}
