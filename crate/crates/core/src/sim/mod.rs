//! Reaction-network models and exact stochastic simulation.

mod model_file;
pub mod models;
mod network;
mod ssa;

pub use model_file::{ModelDocument, ReactionEntry, SpeciesEntry};
pub use models::{builtin_model, MODEL_NAMES, VILAR_TRUE_THETA};
pub use network::{HillTerm, PropensityKind, Reaction, ReactionNetwork, Species};
pub use ssa::{simulate, Gillespie, SimulationRequest, Trajectory};
