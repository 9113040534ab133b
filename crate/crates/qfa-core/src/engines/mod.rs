//! Monte Carlo trajectory sampling and exact absorption analysis.

mod estimate;
mod exact;
mod flat;
pub(crate) mod trajectory;

pub use estimate::{
    estimate, wilson_interval, EstimateReport, VerdictCounts, REPORT_FORMAT, Z95, Z99,
};
pub use exact::{solve_exact, AbsorptionSolution, ExactOptions};
pub use trajectory::{run_trajectory, trial_rng, RunReport};

use crate::machine::MachineError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("spec failed validation: {0}")]
    Invalid(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
}
