use std::fmt;
use std::io::Write;

use super::{AutoscaleError, Thresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingAction {
    ScaleUp(u32),
    ScaleDown(u32),
    NoAction,
}

impl ScalingAction {
    /// Builds an action from a signed VM delta; zero means no action.
    pub fn from_delta(delta: i64) -> Self {
        match delta {
            d if d > 0 => ScalingAction::ScaleUp(d.min(i64::from(u32::MAX)) as u32),
            d if d < 0 => ScalingAction::ScaleDown((-d).min(i64::from(u32::MAX)) as u32),
            _ => ScalingAction::NoAction,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ScalingAction::ScaleUp(_) => "scale_up",
            ScalingAction::ScaleDown(_) => "scale_down",
            ScalingAction::NoAction => "none",
        }
    }

    pub fn count(&self) -> u32 {
        match *self {
            ScalingAction::ScaleUp(n) | ScalingAction::ScaleDown(n) => n,
            ScalingAction::NoAction => 0,
        }
    }
}

/// Fleet facts a policy may look at when deciding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FleetView {
    pub running: u32,
    pub booting: u32,
    /// Demand queued and not yet served.
    pub backlog: f64,
}

impl FleetView {
    /// VMs that will be serving once every pending boot completes.
    pub fn provisioned(&self) -> u32 {
        self.running + self.booting
    }
}

/// What a policy sees at interval `t`: the demand history up to and
/// including `t`, and the current fleet.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub t: usize,
    pub history: &'a [f64],
    pub fleet: FleetView,
}

/// One row of the decision audit log.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRecord {
    pub t: usize,
    pub predicted: Option<f64>,
    pub thresholds: Option<Thresholds<f64>>,
    pub chosen_model: &'static str,
    pub action: ScalingAction,
    pub tick_up: u32,
    pub tick_down: u32,
}

impl AuditRecord {
    pub fn idle(t: usize, action: ScalingAction) -> Self {
        Self {
            t,
            predicted: None,
            thresholds: None,
            chosen_model: "-",
            action,
            tick_up: 0,
            tick_down: 0,
        }
    }
}

struct Opt(Option<f64>);

impl fmt::Display for Opt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v}"),
            None => Ok(()),
        }
    }
}

pub const AUDIT_HEADER: &str = "t,predicted,thr_u,thr_bu,thr_l,chosen_model,action,count,tick_up,tick_down";

/// Writes the audit log as
/// `t,predicted,thr_u,thr_bu,thr_l,chosen_model,action,count,tick_up,tick_down`.
pub fn write_audit_csv<W: Write>(records: &[AuditRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{AUDIT_HEADER}")?;
    for r in records {
        let thr = r.thresholds;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.t,
            Opt(r.predicted),
            Opt(thr.map(|t| t.thr_u)),
            Opt(thr.map(|t| t.thr_bu)),
            Opt(thr.map(|t| t.thr_l)),
            r.chosen_model,
            r.action.kind(),
            r.action.count(),
            r.tick_up,
            r.tick_down,
        )?;
    }
    out.flush()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: ScalingAction,
    pub audit: AuditRecord,
}

/// A scaling strategy driven once per interval by the simulator.
pub trait ScalingPolicy: Send {
    fn name(&self) -> &str;

    fn step(&mut self, obs: &Observation<'_>) -> Result<Decision, AutoscaleError>;

    /// Intervals a VM stays billed after being marked for removal.
    fn termination_grace(&self) -> usize {
        0
    }
}
