//! Trace-driven auto-scaling laboratory: log ingestion, LSTM demand
//! forecasting, adaptive-threshold scaling, fleet simulation and reporting.

pub mod autoscaler;
pub mod predictor;
pub mod report;
mod scalar;
pub mod scenario;
pub mod simulator;
pub mod trace;

pub use scalar::Scalar;

/// Double-precision LSTM regressor.
pub type LstmModel = predictor::Lstm<f64>;
/// Single-precision LSTM regressor.
pub type LstmModelF32 = predictor::Lstm<f32>;
pub type MapeAccumulator = predictor::MapeAccumulator<f64>;
pub type Thresholds = autoscaler::Thresholds<f64>;
pub type Normalizer = predictor::Normalizer<f64>;
