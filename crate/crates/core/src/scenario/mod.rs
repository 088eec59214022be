//! Scenario files and the end-to-end experiment pipeline.

mod config;
mod pipeline;

pub use config::{
    CostModelConfig, DataSection, FleetSection, PredictorSection, ReportSection, Scenario, ScenarioConfig,
    ServiceSection,
};
pub use pipeline::{
    build_policy, build_workloads, ingest, report_rows, run_comparison, simulate, slashdot_corpus, sliding_window,
    train_models, training_sets, write_atomic, write_comparison, write_model_outputs, write_result, Comparison,
    Strategy, TrainedModels, Workloads,
};

use std::path::PathBuf;

use crate::autoscaler::AutoscaleError;
use crate::predictor::PredictorError;
use crate::report::ReportError;
use crate::simulator::SimError;
use crate::trace::TraceError;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {}: {source}", path.display())]
    ConfigIo { path: PathBuf, source: std::io::Error },
    #[error("bad scenario {}: {message}", path.display())]
    ConfigParse { path: PathBuf, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("cannot read {}: {source}", path.display())]
    DataIo { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Trace { path: PathBuf, source: TraceError },
    #[error(transparent)]
    Predictor(#[from] PredictorError),
    #[error(transparent)]
    Autoscale(#[from] AutoscaleError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },
}

impl ScenarioError {
    /// True for problems with the scenario or its parameters, as opposed to
    /// the data it points at.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            ScenarioError::ConfigIo { .. }
                | ScenarioError::ConfigParse { .. }
                | ScenarioError::Invalid(_)
                | ScenarioError::Predictor(PredictorError::InvalidConfig(_))
                | ScenarioError::Autoscale(AutoscaleError::InvalidConfig(_))
                | ScenarioError::Sim(SimError::InvalidConfig(_))
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [data]
        trace = "log.txt"
    "#;

    #[test]
    fn defaults_fill_in() {
        let sc = Scenario::from_toml(MINIMAL, PathBuf::from("/data")).unwrap();
        assert_eq!(sc.config.interval, 300);
        assert_eq!(sc.config.data.splice_hour, 223);
        assert_eq!(sc.config.predictor.window_length, 24);
        assert_eq!(sc.config.scaler.mape_window, 24);
        assert_eq!(sc.resolve(&sc.config.data.trace), PathBuf::from("/data/log.txt"));
        assert_eq!(sc.group(), 12);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\n[vm]\ncapacity = 2.0\nspeed = 3\n");
        assert!(matches!(
            Scenario::from_toml(&text, PathBuf::new()),
            Err(ScenarioError::ConfigParse { .. })
        ));
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let text = format!("{MINIMAL}\n[fleet]\nmin_vms = 5\nmax_vms = 2\n");
        let err = Scenario::from_toml(&text, PathBuf::new()).unwrap_err();
        assert!(err.is_config(), "{err}");
    }

    #[test]
    fn missing_file_names_path() {
        let err = Scenario::load(std::path::Path::new("/nonexistent/scenario.toml")).unwrap_err();
        assert!(err.is_config());
        assert!(err.to_string().contains("/nonexistent/scenario.toml"));
    }

    #[test]
    fn nested_sections_parse() {
        let text = r#"
            seed = 11
            interval = 600
            [data]
            trace = "a.log"
            spike = "b.csv"
            cost = { kind = "bytes", per_request = 0.5, per_kib = 0.01 }
            [scaler]
            mape_window = 6
            basis = "absolute"
            [scaler.thresholds]
            c1 = 0.25
            [train]
            epochs = 3
        "#;
        let sc = Scenario::from_toml(text, PathBuf::new()).unwrap();
        assert_eq!(sc.config.scaler.thresholds.c1, 0.25);
        assert_eq!(sc.config.scaler.basis, crate::autoscaler::ThresholdBasis::Absolute);
        assert_eq!(sc.config.train.epochs, 3);
        assert_eq!(sc.train_config(99).seed, 99);
        assert_eq!(
            sc.config.data.cost,
            CostModelConfig::Bytes {
                per_request: 0.5,
                per_kib: 0.01
            }
        );
    }

    #[test]
    fn corpus_is_seeded() {
        let spike = [1.0, 4.0, 2.0];
        let a = slashdot_corpus(&spike, 4, [0.5, 1.5], 3);
        assert_eq!(a, slashdot_corpus(&spike, 4, [0.5, 1.5], 3));
        assert_ne!(a, slashdot_corpus(&spike, 4, [0.5, 1.5], 4));
        assert_eq!(a.len(), 12);
        for tile in a.chunks(3) {
            let k = tile[0];
            assert!((0.5..=1.5).contains(&k));
            assert!((tile[1] - 4.0 * k).abs() < 1e-12);
        }
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
        }
        assert!("magic".parse::<Strategy>().is_err());
    }
}
