//! Reactive and trend-forecasting baseline scalers.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::autoscaler::{
    plan_capacity, AuditRecord, AutoscaleError, CapacityPlan, Decision, Observation, ScalingAction, ScalingPolicy,
    Signal, Thresholds, TickTimers,
};
use crate::Scalar;

use super::SimError;

/// Holt's linear method: level and trend recurrences started from
/// `s1 = x1`, `b1 = x2 - x1`, forecasting `s_n + horizon * b_n`.
pub fn double_exponential_smoothing<T: Scalar>(series: &[T], alpha: T, beta: T, horizon: T) -> Result<T, SimError> {
    if series.len() < 2 {
        return Err(SimError::InsufficientHistory { got: series.len() });
    }
    let one = T::one();
    let mut level = series[0];
    let mut trend = series[1] - series[0];
    for &x in &series[1..] {
        let prev = level;
        level = alpha * x + (one - alpha) * (level + trend);
        trend = beta * (level - prev) + (one - beta) * trend;
    }
    Ok(level + horizon * trend)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesConfig {
    pub alpha: f64,
    pub beta: f64,
    pub upper: f64,
    pub lower: f64,
    /// Consecutive out-of-band forecasts needed before acting.
    pub dwell: u32,
    /// Trailing observations the smoother is run over.
    pub history: usize,
    /// Intervals after a scale-up during which scale-down is suppressed.
    pub cooldown: usize,
}

impl Default for DesConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 0.3,
            upper: 0.8,
            lower: 0.3,
            dwell: 1,
            history: 12,
            cooldown: 6,
        }
    }
}

impl DesConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let open = |v: f64| v > 0.0 && v < 1.0;
        if !(open(self.alpha) && open(self.beta)) {
            return Err(SimError::InvalidConfig("alpha and beta must lie in (0, 1)".into()));
        }
        if !(self.lower < self.upper) || self.dwell == 0 || self.history < 2 {
            return Err(SimError::InvalidConfig("need lower < upper, dwell >= 1, history >= 2".into()));
        }
        Ok(())
    }
}

/// Forecasts utilization `horizon` intervals ahead and compares it with the
/// static bounds. Returns the signal and the forecast.
pub fn baseline_des_threshold(
    util_history: &[f64],
    cfg: &DesConfig,
    horizon: usize,
    dwell: &mut TickTimers,
) -> Result<(Signal, f64), SimError> {
    let start = util_history.len().saturating_sub(cfg.history);
    let forecast =
        double_exponential_smoothing(&util_history[start..], cfg.alpha, cfg.beta, horizon as f64)?.max(0.0);
    let signal = if forecast > cfg.upper {
        dwell.tick_down = 0;
        dwell.tick_up += 1;
        if dwell.tick_up >= cfg.dwell {
            Signal::ScaleUp
        } else {
            Signal::Hold
        }
    } else if forecast < cfg.lower {
        dwell.tick_up = 0;
        dwell.tick_down += 1;
        if dwell.tick_down >= cfg.dwell {
            Signal::ScaleDown
        } else {
            Signal::Hold
        }
    } else {
        *dwell = TickTimers::default();
        Signal::Hold
    };
    Ok((signal, forecast))
}

/// Threshold scaler whose trigger is a double-exponential-smoothing forecast
/// over the VM turnaround time. Utilization history is expressed against the
/// currently provisioned fleet.
pub struct DesThresholdScaler {
    cfg: DesConfig,
    plan: CapacityPlan,
    horizon: usize,
    dwell: TickTimers,
    last_scale_up: Option<usize>,
}

impl DesThresholdScaler {
    pub fn new(cfg: DesConfig, plan: CapacityPlan, turnaround: usize) -> Result<Self, SimError> {
        cfg.validate()?;
        plan.validate()?;
        Ok(Self {
            cfg,
            plan,
            horizon: turnaround.max(1),
            dwell: TickTimers::default(),
            last_scale_up: None,
        })
    }
}

impl ScalingPolicy for DesThresholdScaler {
    fn name(&self) -> &str {
        "des"
    }

    fn step(&mut self, obs: &Observation<'_>) -> Result<Decision, AutoscaleError> {
        if obs.history.len() < 2 {
            return Ok(Decision {
                action: ScalingAction::NoAction,
                audit: AuditRecord::idle(obs.t, ScalingAction::NoAction),
            });
        }
        let provisioned = obs.fleet.provisioned().max(1);
        let fleet_cap = f64::from(provisioned) * self.plan.vm_capacity;
        let start = obs.history.len().saturating_sub(self.cfg.history);
        let util: Vec<f64> = obs.history[start..].iter().map(|d| d / fleet_cap).collect();
        let (signal, forecast) = baseline_des_threshold(&util, &self.cfg, self.horizon, &mut self.dwell)
            .map_err(|e| AutoscaleError::InvalidConfig(e.to_string()))?;
        let predicted = forecast * fleet_cap;
        let delta = plan_capacity(predicted, provisioned, &self.plan);
        let cooled = self.last_scale_up.is_none_or(|t| obs.t >= t + self.cfg.cooldown);
        let action = match signal {
            Signal::ScaleUp if delta > 0 => ScalingAction::from_delta(delta),
            Signal::ScaleDown if delta < 0 && cooled => ScalingAction::from_delta(delta),
            _ => ScalingAction::NoAction,
        };
        if matches!(action, ScalingAction::ScaleUp(_)) {
            self.last_scale_up = Some(obs.t);
        }
        Ok(Decision {
            action,
            audit: AuditRecord {
                t: obs.t,
                predicted: Some(predicted),
                thresholds: Some(Thresholds {
                    thr_u: self.cfg.upper,
                    thr_bu: self.cfg.upper,
                    thr_l: self.cfg.lower,
                }),
                chosen_model: "des",
                action,
                tick_up: self.dwell.tick_up,
                tick_down: self.dwell.tick_down,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixedStepConfig {
    pub step: u32,
    pub upper: f64,
    pub lower: f64,
    /// Consecutive intervals above `upper` before scaling up.
    pub dwell: u32,
    /// Observations that must be strictly decreasing to count as a
    /// downward trend.
    pub trend_window: usize,
    /// Time a VM marked for removal keeps running before termination.
    pub grace_seconds: u32,
}

impl Default for FixedStepConfig {
    fn default() -> Self {
        Self {
            step: 2,
            upper: 0.8,
            lower: 0.3,
            dwell: 2,
            trend_window: 4,
            grace_seconds: 300,
        }
    }
}

impl FixedStepConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.step == 0 || self.dwell == 0 || self.trend_window < 2 || !(self.lower < self.upper) {
            return Err(SimError::InvalidConfig(
                "need step >= 1, dwell >= 1, trend_window >= 2, lower < upper".into(),
            ));
        }
        Ok(())
    }
}

/// Reactive fixed-step rule over observed utilization. `above` counts the
/// consecutive intervals spent above the upper threshold and restarts after
/// each scale-up.
pub fn baseline_fixed_step(util_history: &[f64], cfg: &FixedStepConfig, above: &mut u32) -> ScalingAction {
    let Some(&now) = util_history.last() else {
        return ScalingAction::NoAction;
    };
    if now > cfg.upper {
        *above += 1;
        return if *above >= cfg.dwell {
            *above = 0;
            ScalingAction::ScaleUp(cfg.step)
        } else {
            ScalingAction::NoAction
        };
    }
    *above = 0;
    let trend_down = util_history.len() >= cfg.trend_window
        && util_history[util_history.len() - cfg.trend_window..]
            .windows(2)
            .all(|w| w[1] < w[0]);
    if now < cfg.lower || trend_down {
        ScalingAction::ScaleDown(cfg.step)
    } else {
        ScalingAction::NoAction
    }
}

/// Fixed-step reactive scaler. Utilization counts queued demand against the
/// serving fleet.
pub struct FixedStepScaler {
    cfg: FixedStepConfig,
    vm_capacity: f64,
    grace: usize,
    above: u32,
    util: VecDeque<f64>,
}

impl FixedStepScaler {
    pub fn new(cfg: FixedStepConfig, vm_capacity: f64, interval_s: u32) -> Result<Self, SimError> {
        cfg.validate()?;
        if !(vm_capacity > 0.0) || interval_s == 0 {
            return Err(SimError::InvalidConfig("vm capacity and interval must be positive".into()));
        }
        let grace = cfg.grace_seconds.div_ceil(interval_s) as usize;
        Ok(Self {
            cfg,
            vm_capacity,
            grace,
            above: 0,
            util: VecDeque::new(),
        })
    }
}

impl ScalingPolicy for FixedStepScaler {
    fn name(&self) -> &str {
        "fixed-step"
    }

    fn step(&mut self, obs: &Observation<'_>) -> Result<Decision, AutoscaleError> {
        let demand = obs.history.last().copied().ok_or(AutoscaleError::EmptyInput)?;
        let running = f64::from(obs.fleet.running.max(1));
        self.util.push_back((demand + obs.fleet.backlog) / (running * self.vm_capacity));
        while self.util.len() > self.cfg.trend_window {
            self.util.pop_front();
        }
        let util = self.util.make_contiguous();
        let action = baseline_fixed_step(util, &self.cfg, &mut self.above);
        Ok(Decision {
            action,
            audit: AuditRecord {
                t: obs.t,
                predicted: None,
                thresholds: Some(Thresholds {
                    thr_u: self.cfg.upper,
                    thr_bu: self.cfg.upper,
                    thr_l: self.cfg.lower,
                }),
                chosen_model: "fixed-step",
                action,
                tick_up: self.above,
                tick_down: 0,
            },
        })
    }

    fn termination_grace(&self) -> usize {
        self.grace
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn des_constant_is_fixed_point() {
        for h in [1.0, 5.0, 40.0] {
            assert_eq!(double_exponential_smoothing(&[3.5; 10], 0.4, 0.6, h).unwrap(), 3.5);
        }
    }

    #[test]
    fn des_unit_smoothing_is_last_plus_diff() {
        assert_eq!(double_exponential_smoothing(&[1.0, 2.0, 3.0, 4.0], 1.0, 1.0, 2.0).unwrap(), 6.0);
    }

    #[test]
    fn des_half_smoothing_two_points() {
        assert_eq!(double_exponential_smoothing(&[2.0, 4.0], 0.5, 0.5, 1.0).unwrap(), 6.0);
    }

    #[test]
    fn des_continues_a_ramp() {
        // Starting from s1=x1, b1=x2-x1 on an exact ramp, both recurrences
        // stay on the line for any smoothing constants.
        let ramp: Vec<f64> = (1..=8).map(|i| 0.1 * f64::from(i)).collect();
        let f = double_exponential_smoothing(&ramp, 0.3, 0.7, 2.0).unwrap();
        assert!((f - 1.0).abs() < 1e-12, "{f}");
    }

    #[test]
    fn des_needs_two_points() {
        assert!(matches!(
            double_exponential_smoothing(&[1.0_f64], 0.5, 0.5, 1.0),
            Err(SimError::InsufficientHistory { got: 1 })
        ));
    }

    #[test]
    fn des_threshold_signals() {
        let cfg = DesConfig::default();
        let mut dwell = TickTimers::default();
        let (s, f) = baseline_des_threshold(&[0.5; 6], &cfg, 2, &mut dwell).unwrap();
        assert_eq!(s, Signal::Hold);
        assert_eq!(f, 0.5);
        let (s, _) = baseline_des_threshold(&[0.95; 6], &cfg, 2, &mut dwell).unwrap();
        assert_eq!(s, Signal::ScaleUp);
        let (s, _) = baseline_des_threshold(&[0.1; 6], &cfg, 2, &mut dwell).unwrap();
        assert_eq!(s, Signal::ScaleDown);
    }

    #[test]
    fn fixed_step_examples() {
        let cfg = FixedStepConfig {
            step: 11,
            ..FixedStepConfig::default()
        };
        let mut above = 0;
        assert_eq!(baseline_fixed_step(&[0.95], &cfg, &mut above), ScalingAction::NoAction);
        assert_eq!(baseline_fixed_step(&[0.95, 0.95], &cfg, &mut above), ScalingAction::ScaleUp(11));
        assert_eq!(baseline_fixed_step(&[0.95, 0.95, 0.95], &cfg, &mut above), ScalingAction::NoAction);
        let mut above = 0;
        assert_eq!(baseline_fixed_step(&[0.5, 0.5, 0.5, 0.5], &cfg, &mut above), ScalingAction::NoAction);
        assert_eq!(baseline_fixed_step(&[0.1], &cfg, &mut above), ScalingAction::ScaleDown(11));
        assert_eq!(baseline_fixed_step(&[0.7, 0.6, 0.5, 0.4], &cfg, &mut above), ScalingAction::ScaleDown(11));
    }

    #[test]
    fn fixed_step_grace_in_intervals() {
        let p = FixedStepScaler::new(FixedStepConfig::default(), 1.0, 300).unwrap();
        assert_eq!(p.termination_grace(), 1);
        let p = FixedStepScaler::new(FixedStepConfig::default(), 1.0, 120).unwrap();
        assert_eq!(p.termination_grace(), 3);
    }
}
