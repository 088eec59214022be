use std::io::Write;

use crate::autoscaler::{write_audit_csv, AuditRecord};

use super::{SimConfig, VmSpec};

pub const SIM_HEADER: &str = "t,running_vms,booting_vms,avg_response_ms,completed,backlog,sla_violated,cost_cumulative";

/// State of the fleet and service during one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub t: usize,
    pub demand: f64,
    /// VMs serving during the interval.
    pub running_vms: u32,
    /// VMs still booting once this interval's actions are applied.
    pub booting_vms: u32,
    /// VMs marked for removal but still billed.
    pub draining_vms: u32,
    pub avg_response_ms: f64,
    pub completed: f64,
    /// Demand left queued at the end of the interval.
    pub backlog: f64,
    pub sla_violated: bool,
    pub cost_cumulative: f64,
    /// VMs launched by this interval's action.
    pub launched: u32,
    /// VMs that finished booting at the start of this interval.
    pub ready: u32,
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub strategy: String,
    pub start_time: i64,
    pub interval_s: u32,
    pub spec: VmSpec,
    pub config: SimConfig,
    pub records: Vec<SimRecord>,
    pub audit: Vec<AuditRecord>,
}

impl SimResult {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_demand(&self) -> f64 {
        self.records.iter().map(|r| r.demand).sum()
    }

    pub fn total_completed(&self) -> f64 {
        self.records.iter().map(|r| r.completed).sum()
    }

    pub fn final_backlog(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.backlog)
    }

    pub fn total_cost(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cost_cumulative)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{SIM_HEADER}")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.t,
                r.running_vms,
                r.booting_vms,
                r.avg_response_ms,
                r.completed,
                r.backlog,
                u8::from(r.sla_violated),
                r.cost_cumulative
            )?;
        }
        out.flush()
    }

    pub fn write_audit_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_audit_csv(&self.audit, out)
    }
}
