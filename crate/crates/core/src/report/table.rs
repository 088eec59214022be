use std::io::Write;
use std::ops::Range;

use crate::simulator::{SimRecord, SimResult};

use super::ReportError;

/// How interval values fold into one coarser row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Mean,
    Last,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    RunningVms,
    BootingVms,
    AvgResponseMs,
    Completed,
    Backlog,
    CostCumulative,
    SlaViolations,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::RunningVms,
        Metric::BootingVms,
        Metric::AvgResponseMs,
        Metric::Completed,
        Metric::Backlog,
        Metric::CostCumulative,
        Metric::SlaViolations,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::RunningVms => "running_vms",
            Metric::BootingVms => "booting_vms",
            Metric::AvgResponseMs => "avg_response_ms",
            Metric::Completed => "completed",
            Metric::Backlog => "backlog",
            Metric::CostCumulative => "cost_cumulative",
            Metric::SlaViolations => "sla_violations",
        }
    }

    pub fn aggregation(self) -> Aggregation {
        match self {
            Metric::AvgResponseMs => Aggregation::Mean,
            Metric::Completed | Metric::SlaViolations => Aggregation::Sum,
            Metric::RunningVms | Metric::BootingVms | Metric::Backlog | Metric::CostCumulative => Aggregation::Last,
        }
    }

    pub fn value(self, r: &SimRecord) -> f64 {
        match self {
            Metric::RunningVms => f64::from(r.running_vms),
            Metric::BootingVms => f64::from(r.booting_vms),
            Metric::AvgResponseMs => r.avg_response_ms,
            Metric::Completed => r.completed,
            Metric::Backlog => r.backlog,
            Metric::CostCumulative => r.cost_cumulative,
            Metric::SlaViolations => f64::from(u8::from(r.sla_violated)),
        }
    }
}

pub fn aggregate(values: &[f64], how: Aggregation) -> f64 {
    match how {
        Aggregation::Mean => values.iter().sum::<f64>() / values.len() as f64,
        Aggregation::Last => values.last().copied().unwrap_or(f64::NAN),
        Aggregation::Sum => values.iter().sum(),
    }
}

/// Strategy-by-time table for one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub metric: Metric,
    pub columns: Vec<String>,
    /// `(time index, one value per column)`.
    pub rows: Vec<(usize, Vec<f64>)>,
}

impl Table {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "time,{}", self.columns.join(","))?;
        for (time, values) in &self.rows {
            write!(out, "{time}")?;
            for v in values {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        out.flush()
    }

    /// Whitespace-separated columns with a `#` header, as gnuplot reads them.
    pub fn write_dat<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# {}: time {}", self.metric.name(), self.columns.join(" "))?;
        for (time, values) in &self.rows {
            write!(out, "{time}")?;
            for v in values {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        out.flush()
    }
}

/// Lays out `metric` for every result side by side, folding `group`
/// intervals into one row (`group = 1` echoes the intervals). `rows`
/// selects output rows, in units of groups; it is cut to the data.
pub fn comparison_table(
    results: &[(&str, &SimResult)],
    metric: Metric,
    group: usize,
    rows: Range<usize>,
) -> Result<Table, ReportError> {
    let (_, first) = results.first().ok_or(ReportError::EmptyResult)?;
    if group == 0 {
        return Err(ReportError::InvalidGroup);
    }
    for (name, r) in results {
        if r.start_time != first.start_time || r.interval_s != first.interval_s || r.len() != first.len() {
            return Err(ReportError::GridMismatch((*name).to_string()));
        }
    }
    let total_rows = first.len().div_ceil(group);
    let rows = rows.start.min(total_rows)..rows.end.min(total_rows);
    let how = metric.aggregation();
    let mut out = Vec::with_capacity(rows.len());
    let mut buf = Vec::with_capacity(group);
    for row in rows {
        let span = row * group..((row + 1) * group).min(first.len());
        let values = results
            .iter()
            .map(|(_, r)| {
                buf.clear();
                buf.extend(r.records[span.clone()].iter().map(|rec| metric.value(rec)));
                aggregate(&buf, how)
            })
            .collect();
        out.push((row, values));
    }
    Ok(Table {
        metric,
        columns: results.iter().map(|(n, _)| (*n).to_string()).collect(),
        rows: out,
    })
}
