use serde::{Deserialize, Serialize};

use super::AutoscaleError;

/// Fleet bounds and the utilization the planner sizes for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityPlan {
    /// Demand one VM can serve per interval.
    pub vm_capacity: f64,
    pub min_vms: u32,
    pub max_vms: u32,
    pub target_util: f64,
}

impl Default for CapacityPlan {
    fn default() -> Self {
        Self {
            vm_capacity: 1.0,
            min_vms: 1,
            max_vms: 1000,
            target_util: 0.7,
        }
    }
}

impl CapacityPlan {
    pub fn validate(&self) -> Result<(), AutoscaleError> {
        if !(self.vm_capacity > 0.0 && self.vm_capacity.is_finite()) {
            return Err(AutoscaleError::InvalidConfig("vm_capacity must be positive".into()));
        }
        if self.min_vms < 1 || self.min_vms > self.max_vms {
            return Err(AutoscaleError::InvalidConfig("need 1 <= min_vms <= max_vms".into()));
        }
        if !(self.target_util > 0.0 && self.target_util <= 1.0) {
            return Err(AutoscaleError::InvalidConfig("target_util must lie in (0, 1]".into()));
        }
        Ok(())
    }

    /// Fleet size that serves `predicted_demand` at the target utilization,
    /// clamped to `[min_vms, max_vms]`. Ratios within 1e-9 (relative) of a
    /// whole number count as that number so an exactly-filled fleet is stable.
    pub fn target_vms(&self, predicted_demand: f64) -> u32 {
        let ratio = predicted_demand.max(0.0) / (self.vm_capacity * self.target_util);
        let needed = if ratio.is_finite() {
            (ratio - 1e-9 * ratio.max(1.0)).ceil().max(0.0)
        } else {
            f64::from(self.max_vms)
        };
        (needed.min(f64::from(self.max_vms)) as u32).clamp(self.min_vms, self.max_vms)
    }
}

/// VMs to add (positive) or remove (negative) so the fleet matches the
/// prediction.
pub fn plan_capacity(predicted_demand: f64, provisioned_vms: u32, plan: &CapacityPlan) -> i64 {
    i64::from(plan.target_vms(predicted_demand)) - i64::from(provisioned_vms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(capacity: f64) -> CapacityPlan {
        CapacityPlan {
            vm_capacity: capacity,
            min_vms: 1,
            max_vms: 100,
            target_util: 0.7,
        }
    }

    #[test]
    fn zero_demand_hits_floor() {
        assert_eq!(plan_capacity(0.0, 5, &plan(100.0)), -4);
    }

    #[test]
    fn sizes_for_target_utilization() {
        assert_eq!(plan_capacity(700.0, 5, &plan(100.0)), 5);
    }

    #[test]
    fn exact_fit_is_fixed_point() {
        for n in 1..60u32 {
            for cap in [1.0, 2.0, 3.0, 7.5, 100.0] {
                let p = plan(cap);
                let demand = f64::from(n) * cap * p.target_util;
                assert_eq!(plan_capacity(demand, n, &p), 0, "n={n} cap={cap}");
            }
        }
    }

    #[test]
    fn clamps_to_max() {
        assert_eq!(plan(1.0).target_vms(1e9), 100);
        assert_eq!(plan(1.0).target_vms(f64::INFINITY), 100);
    }

    #[test]
    fn validation() {
        assert!(plan(1.0).validate().is_ok());
        assert!(plan(0.0).validate().is_err());
        let mut p = plan(1.0);
        p.min_vms = 0;
        assert!(p.validate().is_err());
    }
}
