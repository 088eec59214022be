//! Adaptive-threshold scaling decisions driven by demand forecasts.

mod decision;
mod planner;
mod policy;
mod scaler;
mod thresholds;

pub use decision::{decide, select_model, ModelChoice, Signal, TickTimers};
pub use planner::{plan_capacity, CapacityPlan};
pub use policy::{
    write_audit_csv, AuditRecord, Decision, FleetView, Observation, ScalingAction, ScalingPolicy, AUDIT_HEADER,
};
pub use scaler::{
    autoscale_step_dual, autoscale_step_single, DualLstmScaler, ScalerConfig, ScalerState, SingleLstmScaler,
    ThresholdBasis,
};
pub use thresholds::{compute_thresholds, median, median_absolute_deviation, ThresholdConfig, Thresholds};

use crate::predictor::PredictorError;

#[derive(Debug, thiserror::Error)]
pub enum AutoscaleError {
    #[error("empty input")]
    EmptyInput,
    #[error("history too short: need at least {needed} observations, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Predictor(#[from] PredictorError),
}
