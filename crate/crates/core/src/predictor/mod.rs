//! LSTM demand forecasting: windowing, training, inference and accuracy
//! tracking.

mod checkpoint;
mod gradcheck;
mod lstm;
mod mape;
mod train;
mod window;

pub use checkpoint::{parse_checkpoint, read_checkpoint, to_checkpoint_string, write_checkpoint, CHECKPOINT_VERSION};
pub use gradcheck::{
    analytic_gradient, gradient_check, gradient_check_with, random_case, sample_loss, GradientFault, FD_STEP,
};
pub use lstm::{Gate, Lstm, Normalizer, ParamLayout};
pub use mape::{mape, MapeAccumulator};
pub use train::{lstm_train, TrainConfig, TrainReport, Trained};
pub use window::{make_windows, Sample, SlidingWindow};

use crate::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum PredictorError {
    #[error("series too short: need at least {needed} values, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("training data has no spread (max must exceed min)")]
    DegenerateRange,
    #[error("training loss diverged at epoch {epoch}")]
    DivergedLoss { epoch: usize },
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("no pair with a non-zero actual value")]
    NoValidPairs,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

/// Anything that maps the most recent demand window onto a demand forecast.
pub trait Forecaster: Send + Sync {
    /// Number of trailing observations consumed per forecast.
    fn window_len(&self) -> usize;

    fn forecast(&self, window: &[f64]) -> Result<f64, PredictorError>;
}

impl<T: Scalar> Forecaster for Lstm<T> {
    fn window_len(&self) -> usize {
        self.window().length()
    }

    fn forecast(&self, window: &[f64]) -> Result<f64, PredictorError> {
        let converted: Vec<T> = window.iter().map(|&v| T::lit(v)).collect();
        Ok(self.predict(&converted)?.to_f64_lossy())
    }
}

impl<F: Forecaster + ?Sized> Forecaster for std::sync::Arc<F> {
    fn window_len(&self) -> usize {
        (**self).window_len()
    }

    fn forecast(&self, window: &[f64]) -> Result<f64, PredictorError> {
        (**self).forecast(window)
    }
}
