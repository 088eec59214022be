//! Interval-stepped VM fleet simulation with pluggable scaling policies.

mod baselines;
mod engine;
mod result;

pub use baselines::{
    baseline_des_threshold, baseline_fixed_step, double_exponential_smoothing, DesConfig, DesThresholdScaler,
    FixedStepConfig, FixedStepScaler,
};
pub use engine::{response_time, run_simulation, SimConfig, VmSpec};
pub use result::{SimRecord, SimResult, SIM_HEADER};

use crate::autoscaler::AutoscaleError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("workload is empty")]
    EmptyWorkload,
    #[error("need at least 2 observations, got {got}")]
    InsufficientHistory { got: usize },
    #[error("scaling policy failed: {0}")]
    Policy(#[from] AutoscaleError),
}
