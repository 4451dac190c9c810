//! ABC rejection sampling with bandit-selected or fixed summary statistics.

mod export;
mod prior;
mod sampler;

pub use export::{write_accepted_csv, RunDocument};
pub use prior::{sample_prior, Prior};
pub use sampler::{
    calibrate, mae, posterior_estimate, replay_distance, run_dynamic, run_static, AcceptedSample,
    Combine, InferenceRun, RunConfig, Sampler, Simulator, SsaSimulator, Timings,
};
