//! Arm selection over a statistic pool.
//!
//! Each summary statistic is an arm; pulling it yields the reward
//! `-normalized_distance` for the current simulation. The
//! [`RewardLedger`] keeps the full reward history together with per-arm
//! running sums so that mean rewards are available in `O(1)`.

use std::cmp::Ordering;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Uniform exploration for the first `exploration_budget` iterations,
    /// then greedy exploitation.
    EpsilonFirst,
    EpsilonGreedy,
    /// ε-greedy with exploration probability `ε / (1 + m / exploration_budget)`.
    EpsilonDecreasing,
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditConfig {
    pub strategy: Strategy,
    pub epsilon: f64,
    pub exploration_budget: usize,
    pub seed: u64,
    /// Record rewards for every arm on exploration iterations instead of
    /// only for the pulled arm.
    pub record_all: bool,
}

impl BanditConfig {
    pub fn new(strategy: Strategy, epsilon: f64, n_accept: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::Config(format!(
                "epsilon must lie in [0, 1], got {epsilon}"
            )));
        }
        Ok(Self {
            strategy,
            epsilon,
            exploration_budget: exploration_budget(epsilon, n_accept),
            seed: 0,
            record_all: true,
        })
    }

    pub fn epsilon_first(epsilon: f64, n_accept: usize) -> Result<Self> {
        Self::new(Strategy::EpsilonFirst, epsilon, n_accept)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Number of exploration iterations, `ceil(epsilon * n)`.
pub fn exploration_budget(epsilon: f64, n: usize) -> usize {
    // Absorb rounding in products such as 0.1 * 30 = 3.0000000000000004.
    let x = epsilon * n as f64;
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Exploration,
    Exploitation,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Exploration => "exploration",
            Phase::Exploitation => "exploitation",
        }
    }
}

impl std::str::FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exploration" => Ok(Phase::Exploration),
            "exploitation" => Ok(Phase::Exploitation),
            other => Err(Error::Input(format!("unknown phase `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub arm: usize,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub iteration: usize,
    pub selected: usize,
    pub phase: Phase,
    /// Rewards present this iteration, as `(arm, reward)` in arm order.
    pub rewards: Vec<(usize, f64)>,
}

impl LedgerRow {
    pub fn reward(&self, arm: usize) -> Option<f64> {
        self.rewards
            .iter()
            .find(|(a, _)| *a == arm)
            .map(|&(_, r)| r)
    }
}

/// Append-only reward matrix with per-arm running statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardLedger {
    k: usize,
    rows: Vec<LedgerRow>,
    pull_counts: Vec<u64>,
    sums: Vec<f64>,
    sq_sums: Vec<f64>,
}

impl RewardLedger {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            rows: Vec::new(),
            pull_counts: vec![0; k],
            sums: vec![0.0; k],
            sq_sums: vec![0.0; k],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    pub fn pull_counts(&self) -> &[u64] {
        &self.pull_counts
    }

    pub fn total_pulls(&self) -> u64 {
        self.pull_counts.iter().sum()
    }

    /// Appends one iteration. Every reward must lie in `[-1, 0]`.
    pub fn record(
        &mut self,
        iteration: usize,
        selected: usize,
        phase: Phase,
        rewards: &[(usize, f64)],
    ) -> Result<()> {
        if selected >= self.k {
            return Err(Error::Contract(format!(
                "selected arm {selected} out of range"
            )));
        }
        for &(arm, r) in rewards {
            if arm >= self.k {
                return Err(Error::Contract(format!("arm {arm} out of range")));
            }
            if !(-1.0..=0.0).contains(&r) {
                return Err(Error::Contract(format!(
                    "reward {r} for arm {arm} outside [-1, 0]"
                )));
            }
        }
        let mut sorted = rewards.to_vec();
        sorted.sort_by_key(|&(a, _)| a);
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Contract("duplicate arm in reward row".into()));
        }
        for &(arm, r) in &sorted {
            self.pull_counts[arm] += 1;
            self.sums[arm] += r;
            self.sq_sums[arm] += r * r;
        }
        self.rows.push(LedgerRow {
            iteration,
            selected,
            phase,
            rewards: sorted,
        });
        Ok(())
    }

    pub fn mean(&self, arm: usize) -> Option<f64> {
        match self.pull_counts.get(arm) {
            Some(&n) if n > 0 => Some(self.sums[arm] / n as f64),
            _ => None,
        }
    }

    /// Column means of the reward matrix; `None` for unpulled arms.
    pub fn means(&self) -> Vec<Option<f64>> {
        (0..self.k).map(|a| self.mean(a)).collect()
    }

    /// Sample variance of an arm's rewards (diagnostic only).
    pub fn variance(&self, arm: usize) -> Option<f64> {
        let n = *self.pull_counts.get(arm)?;
        if n < 2 {
            return None;
        }
        let n = n as f64;
        let m = self.sums[arm] / n;
        Some(((self.sq_sums[arm] - n * m * m) / (n - 1.0)).max(0.0))
    }

    /// Arm with the highest mean reward among pulled arms, lowest index on
    /// ties.
    pub fn greedy_arm(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for arm in 0..self.k {
            if let Some(m) = self.mean(arm) {
                if best.is_none_or(|(_, b)| m > b) {
                    best = Some((arm, m));
                }
            }
        }
        best.map(|(a, _)| a)
    }

    /// CSV export: one line per recorded reward.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iteration", "arm_id", "reward", "phase", "selected"])?;
        for row in &self.rows {
            for &(arm, r) in &row.rewards {
                out.write_record([
                    row.iteration.to_string(),
                    arm.to_string(),
                    r.to_string(),
                    row.phase.as_str().to_string(),
                    u8::from(arm == row.selected).to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Rebuilds a ledger from its CSV export.
    pub fn read_csv<R: Read>(k: usize, r: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Line {
            iteration: usize,
            arm_id: usize,
            reward: f64,
            phase: String,
            selected: u8,
        }
        let mut ledger = Self::new(k);
        let mut rdr = csv::Reader::from_reader(r);
        // (iteration, selected arm, phase, rewards) of the row being read
        type Pending = (usize, Option<usize>, Phase, Vec<(usize, f64)>);
        let mut pending: Option<Pending> = None;
        let flush = |ledger: &mut Self, p: Pending| {
            let sel =
                p.1.ok_or_else(|| Error::Input(format!("iteration {} has no selected arm", p.0)))?;
            ledger.record(p.0, sel, p.2, &p.3)
        };
        for line in rdr.deserialize() {
            let line: Line = line?;
            let phase: Phase = line.phase.parse()?;
            if pending.as_ref().is_some_and(|p| p.0 != line.iteration) {
                flush(&mut ledger, pending.take().unwrap())?;
            }
            let p = pending.get_or_insert((line.iteration, None, phase, Vec::new()));
            if line.selected == 1 {
                p.1 = Some(line.arm_id);
            }
            p.3.push((line.arm_id, line.reward));
        }
        if let Some(p) = pending {
            flush(&mut ledger, p)?;
        }
        Ok(ledger)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmRank {
    pub arm: usize,
    pub mean_reward: Option<f64>,
    pub pulls: u64,
}

/// Arms by mean reward (descending), ties by pull count (descending) then
/// index; unpulled arms last.
pub fn rank_arms(ledger: &RewardLedger) -> Result<Vec<ArmRank>> {
    if ledger.total_pulls() == 0 {
        return Err(Error::State("cannot rank arms of an empty ledger".into()));
    }
    let mut ranks: Vec<ArmRank> = (0..ledger.k())
        .map(|arm| ArmRank {
            arm,
            mean_reward: ledger.mean(arm),
            pulls: ledger.pull_counts()[arm],
        })
        .collect();
    ranks.sort_by(|a, b| match (a.mean_reward, b.mean_reward) {
        (Some(x), Some(y)) => y
            .total_cmp(&x)
            .then(b.pulls.cmp(&a.pulls))
            .then(a.arm.cmp(&b.arm)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.arm.cmp(&b.arm),
    });
    Ok(ranks)
}

/// Stateful selector: a config plus its own exploration RNG.
#[derive(Debug, Clone)]
pub struct Bandit {
    cfg: BanditConfig,
    k: usize,
    rng: StreamRng,
}

impl Bandit {
    pub fn new(cfg: BanditConfig, k: usize) -> Result<Self> {
        cfg.validate()?;
        if k < 2 {
            return Err(Error::Config(format!(
                "a bandit needs at least 2 arms, got {k}"
            )));
        }
        let rng = StreamRng::seed_from_u64(cfg.seed);
        Ok(Self { cfg, k, rng })
    }

    pub fn config(&self) -> &BanditConfig {
        &self.cfg
    }

    fn random(&mut self) -> Selection {
        Selection {
            arm: self.rng.gen_range(0..self.k),
            phase: Phase::Exploration,
        }
    }

    fn explore_with(&mut self, p: f64, ledger: &RewardLedger) -> Selection {
        if self.rng.gen::<f64>() < p {
            return self.random();
        }
        match ledger.greedy_arm() {
            Some(arm) => Selection {
                arm,
                phase: Phase::Exploitation,
            },
            // nothing observed yet: fall back to exploring
            None => self.random(),
        }
    }

    /// Chooses the arm for 0-based `iteration`.
    pub fn select(&mut self, ledger: &RewardLedger, iteration: usize) -> Result<Selection> {
        if ledger.k() != self.k {
            return Err(Error::State(format!(
                "ledger has {} arms, bandit has {}",
                ledger.k(),
                self.k
            )));
        }
        match self.cfg.strategy {
            Strategy::UniformRandom => Ok(self.random()),
            Strategy::EpsilonFirst => {
                if iteration < self.cfg.exploration_budget {
                    Ok(self.random())
                } else {
                    let arm = ledger.greedy_arm().ok_or_else(|| {
                        Error::Selection("cannot exploit before any reward is recorded".into())
                    })?;
                    Ok(Selection {
                        arm,
                        phase: Phase::Exploitation,
                    })
                }
            }
            Strategy::EpsilonGreedy => {
                let p = self.cfg.epsilon;
                Ok(self.explore_with(p, ledger))
            }
            Strategy::EpsilonDecreasing => {
                let scale = self.cfg.exploration_budget.max(1) as f64;
                let p = self.cfg.epsilon / (1.0 + iteration as f64 / scale);
                Ok(self.explore_with(p, ledger))
            }
        }
    }
}
