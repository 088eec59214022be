use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::autoscaler::{CapacityPlan, ScalerConfig};
use crate::predictor::TrainConfig;
use crate::simulator::{DesConfig, FixedStepConfig, SimConfig, VmSpec};
use crate::trace::{BytesCost, CpuCostModel, UnitCost};

use super::ScenarioError;

/// Everything one experiment needs, read from a single TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Aggregation interval in seconds.
    #[serde(default = "default_interval")]
    pub interval: u32,
    pub data: DataSection,
    #[serde(default)]
    pub vm: VmSpec,
    #[serde(default)]
    pub fleet: FleetSection,
    #[serde(default)]
    pub service: ServiceSection,
    #[serde(default)]
    pub predictor: PredictorSection,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub scaler: ScalerConfig,
    #[serde(default)]
    pub des: DesConfig,
    #[serde(default)]
    pub fixed_step: FixedStepConfig,
    #[serde(default)]
    pub report: ReportSection,
}

fn default_seed() -> u64 {
    7
}

fn default_interval() -> u32 {
    300
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    /// Access log, relative to the scenario file.
    pub trace: PathBuf,
    /// Hit trace CSV (`time_seconds,hits`); omit for an unspliced workload.
    #[serde(default)]
    pub spike: Option<PathBuf>,
    /// Whole hours after the first aggregated interval at which the spike
    /// is added.
    #[serde(default = "default_splice_hour")]
    pub splice_hour: u64,
    #[serde(default = "one")]
    pub cost_per_hit: f64,
    #[serde(default)]
    pub cost: CostModelConfig,
}

fn default_splice_hour() -> u64 {
    223
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostModelConfig {
    Unit {
        #[serde(default = "one")]
        per_request: f64,
    },
    Bytes {
        per_request: f64,
        per_kib: f64,
    },
}

impl Default for CostModelConfig {
    fn default() -> Self {
        CostModelConfig::Unit { per_request: 1.0 }
    }
}

impl CostModelConfig {
    pub fn build(&self) -> Box<dyn CpuCostModel> {
        match *self {
            CostModelConfig::Unit { per_request } => Box::new(UnitCost(per_request)),
            CostModelConfig::Bytes { per_request, per_kib } => Box::new(BytesCost { per_request, per_kib }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FleetSection {
    pub min_vms: u32,
    pub max_vms: u32,
    pub initial_vms: u32,
    /// Utilization the capacity planner sizes the fleet for.
    pub target_util: f64,
}

impl Default for FleetSection {
    fn default() -> Self {
        Self {
            min_vms: 1,
            max_vms: 1000,
            initial_vms: 1,
            target_util: 0.7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceSection {
    pub base_ms: f64,
    pub slo_ms: f64,
}

impl Default for ServiceSection {
    fn default() -> Self {
        let sim = SimConfig::default();
        Self {
            base_ms: sim.base_ms,
            slo_ms: sim.slo_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictorSection {
    pub window_length: usize,
    /// Hours of the unspliced trace the normal model trains on; defaults to
    /// everything before the splice point.
    pub normal_train_hours: Option<u64>,
    /// Copies of the spike laid end to end to form the spike-only corpus.
    pub slashdot_tiles: usize,
    /// Range the per-copy amplitude is drawn from.
    pub slashdot_amplitude: [f64; 2],
}

impl Default for PredictorSection {
    fn default() -> Self {
        Self {
            window_length: 24,
            normal_train_hours: None,
            slashdot_tiles: 6,
            slashdot_amplitude: [0.5, 1.5],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    /// Seconds folded into one table row.
    pub group_seconds: u32,
    /// First and one-past-last table rows, in groups.
    pub window_start: Option<usize>,
    pub window_end: Option<usize>,
}

impl Default for ReportSection {
    fn default() -> Self {
        Self {
            group_seconds: 3600,
            window_start: None,
            window_end: None,
        }
    }
}

/// A parsed scenario plus the directory its relative paths resolve from.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::ConfigIo {
            path: path.to_path_buf(),
            source,
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, base_dir).map_err(|e| match e {
            ScenarioError::ConfigParse { message, .. } => ScenarioError::ConfigParse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn from_toml(text: &str, base_dir: PathBuf) -> Result<Self, ScenarioError> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| ScenarioError::ConfigParse {
            path: PathBuf::new(),
            message: e.message().to_string(),
        })?;
        let sc = Self { config, base_dir };
        sc.validate()?;
        Ok(sc)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let c = &self.config;
        let invalid = |m: &str| Err(ScenarioError::Invalid(m.to_string()));
        if c.interval == 0 {
            return invalid("interval must be positive");
        }
        if !(c.data.cost_per_hit >= 0.0 && c.data.cost_per_hit.is_finite()) {
            return invalid("cost_per_hit must be non-negative");
        }
        let p = &c.predictor;
        if p.window_length == 0 || p.slashdot_tiles == 0 {
            return invalid("window_length and slashdot_tiles must be positive");
        }
        let [lo, hi] = p.slashdot_amplitude;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return invalid("slashdot_amplitude must be an ordered positive pair");
        }
        if c.report.group_seconds == 0 || !c.report.group_seconds.is_multiple_of(c.interval) {
            return invalid("report.group_seconds must be a positive multiple of interval");
        }
        c.vm.validate()?;
        self.sim_config().validate()?;
        self.capacity_plan().validate()?;
        c.scaler.validate()?;
        c.train.validate()?;
        c.des.validate()?;
        c.fixed_step.validate()?;
        Ok(())
    }

    pub fn sim_config(&self) -> SimConfig {
        let c = &self.config;
        SimConfig {
            min_vms: c.fleet.min_vms,
            max_vms: c.fleet.max_vms,
            initial_vms: c.fleet.initial_vms,
            base_ms: c.service.base_ms,
            slo_ms: c.service.slo_ms,
        }
    }

    pub fn capacity_plan(&self) -> CapacityPlan {
        let c = &self.config;
        CapacityPlan {
            vm_capacity: c.vm.capacity,
            min_vms: c.fleet.min_vms,
            max_vms: c.fleet.max_vms,
            target_util: c.fleet.target_util,
        }
    }

    /// Train config with the seed replaced by `seed`.
    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            seed,
            ..self.config.train.clone()
        }
    }

    /// Intervals per report row.
    pub fn group(&self) -> usize {
        (self.config.report.group_seconds / self.config.interval) as usize
    }
}
