//! Per-statistic distances, min-max normalization and bandit rewards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summaries::StatisticPool;

/// Observed-data summary: per-statistic mean over all observed series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedSummary {
    pub per_statistic: Vec<f64>,
    pub n_observed: usize,
}

impl ObservedSummary {
    pub fn from_series<S: AsRef<[f64]>>(pool: &StatisticPool, series: &[S]) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::Input("no observed series".into()));
        }
        let mut acc = vec![0.0; pool.len()];
        for s in series {
            for (a, v) in acc.iter_mut().zip(pool.evaluate(s.as_ref())?) {
                *a += v;
            }
        }
        let n = series.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Ok(Self {
            per_statistic: acc,
            n_observed: series.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.per_statistic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_statistic.is_empty()
    }
}

/// Absolute difference between a simulated and an observed summary value.
pub fn raw_distance(sim: f64, obs: f64) -> Result<f64> {
    if !sim.is_finite() || !obs.is_finite() {
        return Err(Error::Input(format!(
            "non-finite summary value ({sim}, {obs})"
        )));
    }
    Ok((sim - obs).abs())
}

/// Negated normalized distance.
pub fn reward(normalized_distance: f64) -> f64 {
    -normalized_distance
}

/// Frozen per-statistic min/max of raw distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationState {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub calibration_size: usize,
}

impl NormalizationState {
    /// Builds the state from rows of raw distances (one row per calibration
    /// simulation, one column per statistic).
    pub fn from_history<R: AsRef<[f64]>>(k: usize, rows: &[R]) -> Result<Self> {
        let mut b = NormalizationBuilder::new(k);
        for r in rows {
            b.observe(r.as_ref())?;
        }
        Ok(b.finish())
    }

    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }

    /// `(raw - min) / (max - min)` clamped to `[0, 1]`; 0 when the
    /// calibrated range is degenerate.
    pub fn normalize(&self, stat: usize, raw: f64) -> Result<f64> {
        if self.calibration_size == 0 {
            return Err(Error::State("normalization has not been calibrated".into()));
        }
        let (lo, hi) = match (self.min.get(stat), self.max.get(stat)) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => {
                return Err(Error::State(format!("statistic {stat} has no calibration")));
            }
        };
        if !raw.is_finite() {
            return Err(Error::Input(format!("non-finite distance {raw}")));
        }
        if hi <= lo {
            return Ok(0.0);
        }
        Ok(((raw - lo) / (hi - lo)).clamp(0.0, 1.0))
    }

    /// Normalized distance of statistic `stat` between summary values.
    pub fn distance(&self, stat: usize, sim: f64, obs: f64) -> Result<f64> {
        self.normalize(stat, raw_distance(sim, obs)?)
    }
}

/// Streaming min/max accumulator; worker-local builders can be merged.
#[derive(Debug, Clone)]
pub struct NormalizationBuilder {
    min: Vec<f64>,
    max: Vec<f64>,
    count: usize,
}

impl NormalizationBuilder {
    pub fn new(k: usize) -> Self {
        Self {
            min: vec![f64::INFINITY; k],
            max: vec![f64::NEG_INFINITY; k],
            count: 0,
        }
    }

    pub fn observe(&mut self, raw: &[f64]) -> Result<()> {
        if raw.len() != self.min.len() {
            return Err(Error::Input(format!(
                "expected {} distances, got {}",
                self.min.len(),
                raw.len()
            )));
        }
        for (i, &d) in raw.iter().enumerate() {
            if !d.is_finite() || d < 0.0 {
                return Err(Error::Input(format!("invalid raw distance {d}")));
            }
            self.min[i] = self.min[i].min(d);
            self.max[i] = self.max[i].max(d);
        }
        self.count += 1;
        Ok(())
    }

    pub fn merge(mut self, other: Self) -> Self {
        for i in 0..self.min.len() {
            self.min[i] = self.min[i].min(other.min[i]);
            self.max[i] = self.max[i].max(other.max[i]);
        }
        self.count += other.count;
        self
    }

    pub fn finish(self) -> NormalizationState {
        if self.count == 0 {
            let k = self.min.len();
            return NormalizationState {
                min: vec![0.0; k],
                max: vec![0.0; k],
                calibration_size: 0,
            };
        }
        NormalizationState {
            min: self.min,
            max: self.max,
            calibration_size: self.count,
        }
    }
}

/// Root-mean-square of normalized distances; stays in `[0, 1]`.
pub fn l2_combine(normalized: &[f64]) -> Result<f64> {
    if normalized.is_empty() {
        return Err(Error::Config("empty statistic subset".into()));
    }
    let ss: f64 = normalized.iter().map(|d| d * d).sum();
    Ok(ss.sqrt() / (normalized.len() as f64).sqrt())
}

/// Euclidean combination of per-statistic normalized distances over
/// `subset`, scaled by `1/sqrt(|subset|)`.
pub fn combined_distance(
    norm: &NormalizationState,
    values_sim: &[f64],
    values_obs: &[f64],
    subset: &[usize],
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::Config("empty statistic subset".into()));
    }
    let mut ds = Vec::with_capacity(subset.len());
    for &i in subset {
        let (s, o) = match (values_sim.get(i), values_obs.get(i)) {
            (Some(&s), Some(&o)) => (s, o),
            _ => return Err(Error::Input(format!("statistic index {i} out of range"))),
        };
        ds.push(norm.distance(i, s, o)?);
    }
    l2_combine(&ds)
}
