//! Three-threshold scaling decision with hysteresis timers.
//!
//! The timers persist across calls; they are zeroed once when the engine is
//! created rather than at the top of every decision.

use crate::Scalar;

use super::Thresholds;

/// What the decision maker asks for, before any sizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signal {
    ScaleUp,
    ScaleDown,
    Hold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TickTimers {
    pub tick_up: u32,
    pub tick_down: u32,
}

/// One decision step. Comparisons are strict: `> thr_u` scales up at once,
/// `> thr_bu` counts toward a delayed scale-up, `< thr_l` counts toward a
/// delayed scale-down, and the action fires when a timer exceeds
/// `scaling_delay`. Anything else resets both timers.
pub fn decide<T: Scalar>(timers: &mut TickTimers, thresholds: &Thresholds<T>, predicted: T, scaling_delay: u32) -> Signal {
    if predicted > thresholds.thr_u {
        timers.tick_down = 0;
        timers.tick_up = 0;
        Signal::ScaleUp
    } else if predicted > thresholds.thr_bu {
        timers.tick_down = 0;
        timers.tick_up = timers.tick_up.saturating_add(1);
        if timers.tick_up > scaling_delay {
            Signal::ScaleUp
        } else {
            Signal::Hold
        }
    } else if predicted < thresholds.thr_l {
        timers.tick_up = 0;
        timers.tick_down = timers.tick_down.saturating_add(1);
        if timers.tick_down > scaling_delay {
            Signal::ScaleDown
        } else {
            Signal::Hold
        }
    } else {
        timers.tick_down = 0;
        timers.tick_up = 0;
        Signal::Hold
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Normal,
    Slashdot,
}

impl ModelChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelChoice::Normal => "normal",
            ModelChoice::Slashdot => "slashdot",
        }
    }
}

/// The normal-workload model wins only on a strictly lower MAPE.
pub fn select_model<T: Scalar>(mape_normal: T, mape_slashdot: T) -> ModelChoice {
    if mape_normal < mape_slashdot {
        ModelChoice::Normal
    } else {
        ModelChoice::Slashdot
    }
}
