//! Run export: JSON document plus accepted-sample CSV.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::sampler::{AcceptedSample, InferenceRun, RunConfig, Sampler, Timings};
use crate::bandit::{rank_arms, ArmRank};
use crate::error::Result;
use crate::metric::{NormalizationState, ObservedSummary};
use crate::summaries::StatisticPool;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDocument {
    pub sampler: Sampler,
    pub config: RunConfig,
    pub parameter_names: Vec<String>,
    pub pool: Vec<String>,
    pub observed: ObservedSummary,
    pub calibration: NormalizationState,
    pub accepted: Vec<AcceptedSample>,
    pub total_simulations: usize,
    pub completed: bool,
    pub posterior_mean: Option<Vec<f64>>,
    pub timings: Timings,
    /// File holding the reward ledger, when the sampler keeps one.
    pub ledger_file: Option<String>,
    pub arm_ranking: Option<Vec<ArmRank>>,
}

impl RunDocument {
    pub fn new(
        run: &InferenceRun,
        parameter_names: Vec<String>,
        pool: &StatisticPool,
        observed: &ObservedSummary,
        calibration: &NormalizationState,
    ) -> Self {
        let arm_ranking = run.ledger.as_ref().and_then(|l| rank_arms(l).ok());
        Self {
            sampler: run.sampler.clone(),
            config: run.config.clone(),
            parameter_names,
            pool: pool.ids(),
            observed: observed.clone(),
            calibration: calibration.clone(),
            accepted: run.accepted.clone(),
            total_simulations: run.total_simulations,
            completed: run.completed,
            posterior_mean: super::posterior_estimate(run).ok(),
            timings: run.timings,
            ledger_file: run.ledger.as_ref().map(|_| "ledger.csv".to_string()),
            arm_ranking,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// One row per accepted sample, one column per parameter.
pub fn write_accepted_csv<W: Write>(
    run: &InferenceRun,
    parameter_names: &[String],
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(parameter_names)?;
    for s in &run.accepted {
        out.write_record(s.theta.iter().map(|t| t.to_string()))?;
    }
    out.flush()?;
    Ok(())
}
