use std::io::Write;
use std::ops::Range;

use crate::simulator::SimResult;

use super::ReportError;

/// Headline metrics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub mean_rt: f64,
    pub p95_rt: f64,
    pub sla_violation_pct: f64,
    pub total_cost: f64,
    pub peak_vms: u32,
    /// `None` when no spike window was given or the fleet never halved.
    pub release_lag: Option<usize>,
}

/// Nearest-rank percentile: the smallest value with at least `p` percent
/// of the data at or below it.
pub fn percentile_nearest_rank(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((p / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

/// Intervals from the end of the demand peak inside `spike` until the
/// running fleet is back to at most half its own peak over the window. The
/// demand peak ends at the last interval of the window whose demand is at
/// least half the window maximum.
pub fn release_lag(result: &SimResult, spike: Range<usize>) -> Option<usize> {
    let recs = &result.records;
    let spike = spike.start.min(recs.len())..spike.end.min(recs.len());
    if spike.is_empty() {
        return None;
    }
    let peak = recs[spike.clone()].iter().map(|r| r.demand).fold(f64::NEG_INFINITY, f64::max);
    let peak_end = spike.clone().rev().find(|&t| recs[t].demand >= 0.5 * peak)?;
    let fleet_peak = f64::from(peak_running(result, spike));
    (peak_end..recs.len())
        .find(|&t| f64::from(recs[t].running_vms) <= 0.5 * fleet_peak)
        .map(|t| t - peak_end)
}

/// Mean of `f` over the records in `window`.
pub fn window_mean(result: &SimResult, window: Range<usize>, f: impl Fn(&crate::simulator::SimRecord) -> f64) -> f64 {
    let recs = &result.records[window.start.min(result.len())..window.end.min(result.len())];
    recs.iter().map(f).sum::<f64>() / recs.len() as f64
}

pub fn peak_running(result: &SimResult, window: Range<usize>) -> u32 {
    result.records[window.start.min(result.len())..window.end.min(result.len())]
        .iter()
        .map(|r| r.running_vms)
        .max()
        .unwrap_or(0)
}

pub fn summary(result: &SimResult, slo_ms: f64, spike: Option<Range<usize>>) -> Result<Summary, ReportError> {
    if result.is_empty() {
        return Err(ReportError::EmptyResult);
    }
    let rts: Vec<f64> = result.records.iter().map(|r| r.avg_response_ms).collect();
    let violations = rts.iter().filter(|&&rt| rt > slo_ms).count();
    Ok(Summary {
        mean_rt: rts.iter().sum::<f64>() / rts.len() as f64,
        p95_rt: percentile_nearest_rank(&rts, 95.0).unwrap_or(f64::NAN),
        sla_violation_pct: 100.0 * violations as f64 / rts.len() as f64,
        total_cost: result.total_cost(),
        peak_vms: peak_running(result, 0..result.len()),
        release_lag: spike.and_then(|s| release_lag(result, s)),
    })
}

/// `strategy,mean_rt_ms,p95_rt_ms,sla_violation_pct,total_cost,peak_vms,release_lag`;
/// a missing release lag is left empty.
pub fn write_summary_csv<W: Write>(rows: &[(&str, Summary)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "strategy,mean_rt_ms,p95_rt_ms,sla_violation_pct,total_cost,peak_vms,release_lag")?;
    for (name, s) in rows {
        let lag = s.release_lag.map(|l| l.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{name},{},{},{},{},{},{lag}",
            s.mean_rt, s.p95_rt, s.sla_violation_pct, s.total_cost, s.peak_vms
        )?;
    }
    out.flush()
}
