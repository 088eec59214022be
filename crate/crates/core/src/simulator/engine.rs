use serde::{Deserialize, Serialize};

use crate::autoscaler::{FleetView, Observation, ScalingAction, ScalingPolicy};
use crate::trace::WorkloadSeries;

use super::{SimError, SimRecord, SimResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VmSpec {
    /// Demand one VM serves per interval.
    pub capacity: f64,
    /// Intervals from launch until a VM serves.
    pub startup_delay: usize,
    /// Billing granularity in intervals; every started quantum is charged.
    pub billing_quantum: usize,
    pub cost_per_quantum: f64,
}

impl Default for VmSpec {
    fn default() -> Self {
        Self {
            capacity: 1.0,
            startup_delay: 2,
            billing_quantum: 12,
            cost_per_quantum: 1.0,
        }
    }
}

impl VmSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.capacity > 0.0 && self.capacity.is_finite()) {
            return Err(SimError::InvalidConfig("vm capacity must be positive".into()));
        }
        if self.startup_delay < 1 || self.billing_quantum < 1 {
            return Err(SimError::InvalidConfig("startup_delay and billing_quantum must be at least 1".into()));
        }
        if !(self.cost_per_quantum >= 0.0 && self.cost_per_quantum.is_finite()) {
            return Err(SimError::InvalidConfig("cost_per_quantum must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub min_vms: u32,
    pub max_vms: u32,
    /// Fleet already running at `t = 0`, clamped into the bounds.
    pub initial_vms: u32,
    /// Response time of an idle system.
    pub base_ms: f64,
    pub slo_ms: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            min_vms: 1,
            max_vms: 1000,
            initial_vms: 1,
            base_ms: 200.0,
            slo_ms: 1200.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.min_vms < 1 || self.min_vms > self.max_vms {
            return Err(SimError::InvalidConfig("need 1 <= min_vms <= max_vms".into()));
        }
        if !(self.base_ms > 0.0 && self.base_ms.is_finite() && self.slo_ms > 0.0) {
            return Err(SimError::InvalidConfig("base_ms and slo_ms must be positive".into()));
        }
        Ok(())
    }
}

/// `base_ms * (1 + backlog / capacity) / (1 - rho)` with
/// `rho = min(served / capacity, 0.99)`.
pub fn response_time(served: f64, capacity: f64, backlog: f64, base_ms: f64) -> f64 {
    let rho = (served / capacity).clamp(0.0, 0.99);
    base_ms * (1.0 + backlog.max(0.0) / capacity) / (1.0 - rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Booting,
    Running,
    Draining { until: usize },
}

#[derive(Debug, Clone, Copy)]
struct Vm {
    launched: usize,
    ready_at: usize,
    phase: Phase,
}

fn count(vms: &[Vm], pred: impl Fn(Phase) -> bool) -> u32 {
    vms.iter().filter(|vm| pred(vm.phase)).count() as u32
}

/// Replays `workload` against a fleet controlled by `policy`.
///
/// Each interval: finished boots join the fleet, the policy sees the demand
/// just observed and acts, the serving fleet works through queued plus new
/// demand, every live VM is billed at the start of each quantum since its
/// launch, and any scale-down is applied at the end of the interval
/// (booting VMs are cancelled before running ones are released, newest
/// first, never below `min_vms`).
pub fn run_simulation(
    workload: &WorkloadSeries,
    policy: &mut dyn ScalingPolicy,
    spec: &VmSpec,
    cfg: &SimConfig,
) -> Result<SimResult, SimError> {
    spec.validate()?;
    cfg.validate()?;
    let demand = workload.demand();
    if demand.is_empty() {
        return Err(SimError::EmptyWorkload);
    }
    let grace = policy.termination_grace();
    let initial = cfg.initial_vms.clamp(cfg.min_vms, cfg.max_vms);
    let mut vms: Vec<Vm> = (0..initial)
        .map(|_| Vm {
            launched: 0,
            ready_at: 0,
            phase: Phase::Running,
        })
        .collect();
    let mut backlog = 0.0_f64;
    let mut cost = 0.0_f64;
    let mut records = Vec::with_capacity(demand.len());
    let mut audit = Vec::with_capacity(demand.len());

    for (t, &d) in demand.iter().enumerate() {
        vms.retain(|vm| !matches!(vm.phase, Phase::Draining { until } if until <= t));
        let mut ready = 0;
        for vm in vms.iter_mut() {
            if vm.phase == Phase::Booting && vm.ready_at <= t {
                vm.phase = Phase::Running;
                ready += 1;
            }
        }
        let running = count(&vms, |p| p == Phase::Running);
        let booting = count(&vms, |p| p == Phase::Booting);

        let decision = policy.step(&Observation {
            t,
            history: &demand[..=t],
            fleet: FleetView {
                running,
                booting,
                backlog,
            },
        })?;

        let mut launched = 0;
        if let ScalingAction::ScaleUp(n) = decision.action {
            launched = n.min(cfg.max_vms.saturating_sub(running + booting));
            vms.extend((0..launched).map(|_| Vm {
                launched: t,
                ready_at: t + spec.startup_delay,
                phase: Phase::Booting,
            }));
        }

        let capacity = f64::from(running) * spec.capacity;
        let queued = backlog + d;
        let served = queued.min(capacity);
        backlog = queued - served;
        let rt = response_time(served, capacity, backlog, cfg.base_ms);

        for vm in &vms {
            if (t - vm.launched) % spec.billing_quantum == 0 {
                cost += spec.cost_per_quantum;
            }
        }

        if let ScalingAction::ScaleDown(n) = decision.action {
            release(&mut vms, n, cfg.min_vms, grace, t);
        }

        records.push(SimRecord {
            t,
            demand: d,
            running_vms: running,
            booting_vms: count(&vms, |p| p == Phase::Booting),
            draining_vms: count(&vms, |p| matches!(p, Phase::Draining { .. })),
            avg_response_ms: rt,
            completed: served,
            backlog,
            sla_violated: rt > cfg.slo_ms,
            cost_cumulative: cost,
            launched,
            ready,
        });
        audit.push(decision.audit);
    }

    Ok(SimResult {
        strategy: policy.name().to_string(),
        start_time: workload.start_time(),
        interval_s: workload.interval(),
        spec: *spec,
        config: *cfg,
        records,
        audit,
    })
}

fn release(vms: &mut Vec<Vm>, n: u32, min_vms: u32, grace: usize, t: usize) {
    let mut left = n;
    let mut i = vms.len();
    while left > 0 && i > 0 {
        i -= 1;
        if vms[i].phase == Phase::Booting {
            vms.remove(i);
            left -= 1;
        }
    }
    let mut running = count(vms, |p| p == Phase::Running);
    let mut i = vms.len();
    while left > 0 && running > min_vms && i > 0 {
        i -= 1;
        if vms[i].phase == Phase::Running {
            if grace == 0 {
                vms.remove(i);
            } else {
                vms[i].phase = Phase::Draining { until: t + 1 + grace };
            }
            running -= 1;
            left -= 1;
        }
    }
}
