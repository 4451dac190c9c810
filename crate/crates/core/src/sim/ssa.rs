//! Gillespie direct method.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::network::ReactionNetwork;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRequest {
    pub theta: Vec<f64>,
    pub seed: u64,
    pub t_end: f64,
    pub n_grid_points: usize,
}

/// Observable species counts on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: Vec<u64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["time", "value"])?;
        for (t, v) in self.times.iter().zip(&self.values) {
            out.write_record([t.to_string(), v.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["time", "value"] {
            return Err(Error::Input(format!(
                "expected header `time,value`, got {headers:?}"
            )));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.deserialize() {
            let (t, v): (f64, u64) = rec?;
            times.push(t);
            values.push(v);
        }
        Ok(Self { times, values })
    }
}

/// Uniform grid over `[0, t_end]` with both endpoints included.
pub(crate) fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    let step = t_end / (n - 1) as f64;
    (0..n).map(|i| i as f64 * step).collect()
}

/// Event-level SSA state machine.
///
/// [`propose`](Self::propose) draws the next event without applying it so
/// callers can observe the pre-event state up to the event time.
pub struct Gillespie<'a> {
    network: &'a ReactionNetwork,
    rates: Vec<f64>,
    state: Vec<i64>,
    time: f64,
    propensities: Vec<f64>,
    rng: StreamRng,
}

impl<'a> Gillespie<'a> {
    pub fn new(network: &'a ReactionNetwork, theta: &[f64], seed: u64) -> Result<Self> {
        network.validate_theta(theta)?;
        let rates: Vec<f64> = network.reactions.iter().map(|r| theta[r.rate]).collect();
        let state = network.initial_state();
        let mut sim = Self {
            network,
            rates,
            state,
            time: 0.0,
            propensities: vec![0.0; network.n_reactions()],
            rng: StreamRng::seed_from_u64(seed),
        };
        for j in 0..sim.propensities.len() {
            sim.refresh(j)?;
        }
        Ok(sim)
    }

    #[inline]
    fn refresh(&mut self, j: usize) -> Result<()> {
        let a = self.network.reactions[j].propensity(self.rates[j], &self.state);
        if !a.is_finite() || a < 0.0 {
            return Err(Error::Model(format!(
                "reaction `{}` produced propensity {a} at state {:?}",
                self.network.reactions[j].name, self.state
            )));
        }
        self.propensities[j] = a;
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn state(&self) -> &[i64] {
        &self.state
    }

    /// Draws the time and index of the next reaction, or `None` when the
    /// total propensity is zero (absorbing state).
    pub fn propose(&mut self) -> Result<Option<(f64, usize)>> {
        let total: f64 = self.propensities.iter().sum();
        if !total.is_finite() {
            return Err(Error::Model(format!(
                "total propensity {total} is not finite"
            )));
        }
        if total <= 0.0 {
            return Ok(None);
        }
        let u: f64 = self.rng.gen();
        let wait = -(1.0 - u).ln() / total;
        let target = self.rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (j, &a) in self.propensities.iter().enumerate() {
            if a > 0.0 {
                acc += a;
                chosen = Some(j);
                if target < acc {
                    break;
                }
            }
        }
        // `chosen` is the last positive channel when rounding leaves
        // `target` just above the accumulated sum.
        Ok(chosen.map(|j| (self.time + wait, j)))
    }

    pub fn fire(&mut self, time: f64, reaction: usize) -> Result<()> {
        self.time = time;
        for &(s, d) in self.network.delta(reaction) {
            self.state[s] += d;
            debug_assert!(self.state[s] >= 0, "negative population after firing");
        }
        for k in 0..self.network.dependents(reaction).len() {
            let j = self.network.dependents(reaction)[k];
            self.refresh(j)?;
        }
        Ok(())
    }
}

/// Simulates one exact sample path and records the observable species on a
/// uniform grid. The value at grid time `t` is the state after the last
/// event at or before `t`.
pub fn simulate(network: &ReactionNetwork, req: &SimulationRequest) -> Result<Trajectory> {
    if req.n_grid_points == 0 {
        return Err(Error::Input("n_grid_points must be positive".into()));
    }
    if !(req.t_end.is_finite() && req.t_end > 0.0) {
        return Err(Error::Input(format!(
            "t_end must be positive, got {}",
            req.t_end
        )));
    }
    let times = uniform_grid(req.t_end, req.n_grid_points);
    let mut values = Vec::with_capacity(times.len());
    let mut ssa = Gillespie::new(network, &req.theta, req.seed)?;
    let obs = network.observable;

    while values.len() < times.len() {
        match ssa.propose()? {
            None => {
                let v = ssa.state()[obs] as u64;
                values.resize(times.len(), v);
            }
            Some((t_next, j)) => {
                let v = ssa.state()[obs] as u64;
                while values.len() < times.len() && times[values.len()] < t_next {
                    values.push(v);
                }
                if values.len() < times.len() {
                    ssa.fire(t_next, j)?;
                }
            }
        }
    }
    Ok(Trajectory { times, values })
}
