use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::predictor::{Forecaster, MapeAccumulator, PredictorError, SlidingWindow};

use super::{
    compute_thresholds, decide, plan_capacity, select_model, AuditRecord, AutoscaleError, CapacityPlan, Decision,
    FleetView, ModelChoice, Observation, ScalingAction, ScalingPolicy, Signal, ThresholdConfig, Thresholds,
    TickTimers,
};

/// What demand is divided by before it is compared with the thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdBasis {
    /// Capacity of the currently provisioned fleet.
    #[default]
    Utilization,
    /// Capacity of the largest fleet allowed, so the comparison tracks
    /// absolute demand.
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalerConfig {
    pub thresholds: ThresholdConfig,
    /// Thresholds in force until the first refresh.
    pub initial: Thresholds<f64>,
    pub basis: ThresholdBasis,
    /// Number of recent (actual, predicted) pairs each MAPE is computed over.
    pub mape_window: usize,
}

impl Default for ScalerConfig {
    fn default() -> Self {
        Self {
            thresholds: ThresholdConfig::default(),
            initial: Thresholds::default(),
            basis: ThresholdBasis::default(),
            mape_window: 24,
        }
    }
}

impl ScalerConfig {
    pub fn validate(&self) -> Result<(), AutoscaleError> {
        self.thresholds.validate()?;
        if self.mape_window == 0 {
            return Err(AutoscaleError::InvalidConfig("mape_window must be positive".into()));
        }
        if !self.initial.is_ordered() {
            return Err(AutoscaleError::InvalidConfig("initial thresholds must be ordered".into()));
        }
        Ok(())
    }
}

/// Mutable state of one decision loop.
#[derive(Debug, Clone)]
pub struct ScalerState {
    pub timers: TickTimers,
    pub thresholds: Thresholds<f64>,
    pub mape_normal: MapeAccumulator<f64>,
    pub mape_slashdot: MapeAccumulator<f64>,
    /// `(target interval, predicted demand)` from the first model.
    pub cpu_ph1: Vec<(usize, f64)>,
    /// Same for the second model; unused on the single-model path.
    pub cpu_ph2: Vec<(usize, f64)>,
    /// Trailing observed utilization, at most `mad_window` long.
    pub cpu_h: VecDeque<f64>,
    window: SlidingWindow,
    observations: usize,
}

impl ScalerState {
    pub fn new(cfg: &ScalerConfig, window: SlidingWindow) -> Self {
        Self {
            timers: TickTimers::default(),
            thresholds: cfg.initial,
            mape_normal: MapeAccumulator::new(cfg.mape_window),
            mape_slashdot: MapeAccumulator::new(cfg.mape_window),
            cpu_ph1: Vec::new(),
            cpu_ph2: Vec::new(),
            cpu_h: VecDeque::new(),
            window,
            observations: 0,
        }
    }

    pub fn window(&self) -> SlidingWindow {
        self.window
    }

    /// Records the utilization just observed and refreshes the thresholds
    /// when the refresh period comes round. Queued work counts as load, and
    /// like a CPU reading the value saturates at 1.
    fn observe(&mut self, actual: f64, fleet: FleetView, cfg: &ScalerConfig, plan: &CapacityPlan) -> Result<(), AutoscaleError> {
        let tc = &cfg.thresholds;
        let load = actual + fleet.backlog.max(0.0);
        self.cpu_h.push_back(utilization(load, fleet.running, cfg.basis, plan).min(1.0));
        while self.cpu_h.len() > tc.mad_window {
            self.cpu_h.pop_front();
        }
        self.observations += 1;
        if self.observations.is_multiple_of(tc.recompute_period) && self.cpu_h.len() >= tc.recompute_period {
            self.cpu_h.make_contiguous();
            self.thresholds = compute_thresholds(self.cpu_h.as_slices().0, tc)?;
        }
        Ok(())
    }

    fn decide_and_size(
        &mut self,
        t: usize,
        predicted: f64,
        chosen_model: &'static str,
        fleet: FleetView,
        cfg: &ScalerConfig,
        plan: &CapacityPlan,
    ) -> Decision {
        let provisioned = fleet.provisioned();
        let util = utilization(predicted, provisioned, cfg.basis, plan);
        let signal = decide(&mut self.timers, &self.thresholds, util, cfg.thresholds.scaling_delay);
        let delta = plan_capacity(predicted, provisioned, plan);
        let action = match signal {
            Signal::ScaleUp if delta > 0 => ScalingAction::from_delta(delta),
            Signal::ScaleDown if delta < 0 => ScalingAction::from_delta(delta),
            _ => ScalingAction::NoAction,
        };
        Decision {
            action,
            audit: AuditRecord {
                t,
                predicted: Some(predicted),
                thresholds: Some(self.thresholds),
                chosen_model,
                action,
                tick_up: self.timers.tick_up,
                tick_down: self.timers.tick_down,
            },
        }
    }
}

fn utilization(demand: f64, vms: u32, basis: ThresholdBasis, plan: &CapacityPlan) -> f64 {
    let vms = match basis {
        ThresholdBasis::Utilization => vms.max(1),
        ThresholdBasis::Absolute => plan.max_vms,
    };
    demand / (f64::from(vms) * plan.vm_capacity)
}

fn forecast(model: &dyn Forecaster, history: &[f64], win: SlidingWindow) -> Result<f64, AutoscaleError> {
    if model.window_len() != win.length() {
        return Err(PredictorError::ShapeMismatch {
            expected: win.length(),
            got: model.window_len(),
        }
        .into());
    }
    Ok(model.forecast(&history[history.len() - win.length()..])?)
}

/// Feeds the prediction that targeted interval `t` (if any) into `acc`.
fn score(history: &[(usize, f64)], t: usize, actual: f64, acc: &mut MapeAccumulator<f64>) {
    if let Ok(i) = history.binary_search_by_key(&t, |&(target, _)| target) {
        acc.push(actual, history[i].1);
    }
}

fn check_history(history: &[f64], win: SlidingWindow) -> Result<(), AutoscaleError> {
    if history.len() < win.length() {
        return Err(AutoscaleError::SeriesTooShort {
            needed: win.length(),
            got: history.len(),
        });
    }
    Ok(())
}

/// One interval of the two-model scaler. `history` holds demand up to and
/// including the interval just observed. The observation is recorded even
/// when the history is still shorter than the window.
pub fn autoscale_step_dual(
    state: &mut ScalerState,
    history: &[f64],
    normal: &dyn Forecaster,
    slashdot: &dyn Forecaster,
    fleet: FleetView,
    cfg: &ScalerConfig,
    plan: &CapacityPlan,
) -> Result<Decision, AutoscaleError> {
    let (&actual, _) = history.split_last().ok_or(AutoscaleError::EmptyInput)?;
    let t = history.len() - 1;
    state.observe(actual, fleet, cfg, plan)?;
    check_history(history, state.window)?;

    let target = t + state.window.horizon();
    let p1 = forecast(normal, history, state.window)?;
    let p2 = forecast(slashdot, history, state.window)?;
    state.cpu_ph1.push((target, p1));
    state.cpu_ph2.push((target, p2));

    score(&state.cpu_ph1, t, actual, &mut state.mape_normal);
    score(&state.cpu_ph2, t, actual, &mut state.mape_slashdot);

    let choice = select_model(state.mape_normal.value_or_inf(), state.mape_slashdot.value_or_inf());
    let predicted = match choice {
        ModelChoice::Normal => p1,
        ModelChoice::Slashdot => p2,
    };
    Ok(state.decide_and_size(t, predicted, choice.as_str(), fleet, cfg, plan))
}

/// One interval of the one-model scaler. Its accuracy is tracked in
/// `mape_normal` and its predictions in `cpu_ph1`.
pub fn autoscale_step_single(
    state: &mut ScalerState,
    history: &[f64],
    model: &dyn Forecaster,
    fleet: FleetView,
    cfg: &ScalerConfig,
    plan: &CapacityPlan,
) -> Result<Decision, AutoscaleError> {
    let (&actual, _) = history.split_last().ok_or(AutoscaleError::EmptyInput)?;
    let t = history.len() - 1;
    state.observe(actual, fleet, cfg, plan)?;
    check_history(history, state.window)?;

    let predicted = forecast(model, history, state.window)?;
    state.cpu_ph1.push((t + state.window.horizon(), predicted));
    score(&state.cpu_ph1, t, actual, &mut state.mape_normal);
    Ok(state.decide_and_size(t, predicted, "single", fleet, cfg, plan))
}

fn warm_up(result: Result<Decision, AutoscaleError>, state: &ScalerState, t: usize) -> Result<Decision, AutoscaleError> {
    match result {
        Err(AutoscaleError::SeriesTooShort { .. }) => {
            let mut audit = AuditRecord::idle(t, ScalingAction::NoAction);
            audit.thresholds = Some(state.thresholds);
            Ok(Decision {
                action: ScalingAction::NoAction,
                audit,
            })
        }
        other => other,
    }
}

/// Two forecasters routed by recent accuracy.
pub struct DualLstmScaler {
    normal: Arc<dyn Forecaster>,
    slashdot: Arc<dyn Forecaster>,
    cfg: ScalerConfig,
    plan: CapacityPlan,
    state: ScalerState,
}

impl DualLstmScaler {
    pub fn new(
        normal: Arc<dyn Forecaster>,
        slashdot: Arc<dyn Forecaster>,
        window: SlidingWindow,
        cfg: ScalerConfig,
        plan: CapacityPlan,
    ) -> Result<Self, AutoscaleError> {
        cfg.validate()?;
        plan.validate()?;
        let state = ScalerState::new(&cfg, window);
        Ok(Self {
            normal,
            slashdot,
            cfg,
            plan,
            state,
        })
    }

    pub fn state(&self) -> &ScalerState {
        &self.state
    }
}

impl ScalingPolicy for DualLstmScaler {
    fn name(&self) -> &str {
        "dual-lstm"
    }

    fn step(&mut self, obs: &Observation<'_>) -> Result<Decision, AutoscaleError> {
        let result = autoscale_step_dual(
            &mut self.state,
            obs.history,
            self.normal.as_ref(),
            self.slashdot.as_ref(),
            obs.fleet,
            &self.cfg,
            &self.plan,
        );
        warm_up(result, &self.state, obs.t)
    }
}

/// A single forecaster driving the same decision engine.
pub struct SingleLstmScaler {
    model: Arc<dyn Forecaster>,
    cfg: ScalerConfig,
    plan: CapacityPlan,
    state: ScalerState,
}

impl SingleLstmScaler {
    pub fn new(
        model: Arc<dyn Forecaster>,
        window: SlidingWindow,
        cfg: ScalerConfig,
        plan: CapacityPlan,
    ) -> Result<Self, AutoscaleError> {
        cfg.validate()?;
        plan.validate()?;
        let state = ScalerState::new(&cfg, window);
        Ok(Self {
            model,
            cfg,
            plan,
            state,
        })
    }

    pub fn state(&self) -> &ScalerState {
        &self.state
    }
}

impl ScalingPolicy for SingleLstmScaler {
    fn name(&self) -> &str {
        "single-lstm"
    }

    fn step(&mut self, obs: &Observation<'_>) -> Result<Decision, AutoscaleError> {
        let result = autoscale_step_single(
            &mut self.state,
            obs.history,
            self.model.as_ref(),
            obs.fleet,
            &self.cfg,
            &self.plan,
        );
        warm_up(result, &self.state, obs.t)
    }
}
