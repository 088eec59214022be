use super::{LogRecord, TraceError, WorkloadSeries};

/// Maps one request onto the CPU it requires.
pub trait CpuCostModel: Send + Sync {
    fn cost(&self, record: &LogRecord) -> f64;
}

/// Every request costs the same amount (default 1 unit, so demand equals the
/// request count).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitCost(pub f64);

impl Default for UnitCost {
    fn default() -> Self {
        UnitCost(1.0)
    }
}

impl CpuCostModel for UnitCost {
    fn cost(&self, _record: &LogRecord) -> f64 {
        self.0
    }
}

/// Fixed per-request cost plus a term proportional to the response size.
/// Requests without a byte count pay only the fixed part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BytesCost {
    pub per_request: f64,
    pub per_kib: f64,
}

impl CpuCostModel for BytesCost {
    fn cost(&self, record: &LogRecord) -> f64 {
        let kib = record.bytes.unwrap_or(0) as f64 / 1024.0;
        self.per_request + self.per_kib * kib
    }
}

/// Sums request cost into `interval`-second bins.
///
/// The first bin starts at the earliest timestamp floored to a multiple of
/// `interval` on the epoch grid. Bins with no traffic are zero. Costs within a
/// bin are summed in sorted order so the result does not depend on record order.
pub fn aggregate_demand(
    records: &[LogRecord],
    interval: u32,
    cost: &dyn CpuCostModel,
) -> Result<WorkloadSeries, TraceError> {
    if interval == 0 {
        return Err(TraceError::InvalidInterval);
    }
    let earliest = records
        .iter()
        .map(|r| r.timestamp)
        .min()
        .ok_or(TraceError::EmptyInput)?;
    let latest = records.iter().map(|r| r.timestamp).max().unwrap_or(earliest);
    let step = i64::from(interval);
    let start = earliest - earliest.rem_euclid(step);
    let bins = ((latest - start) / step + 1) as usize;

    let mut keyed: Vec<(usize, f64)> = records
        .iter()
        .map(|r| (((r.timestamp - start) / step) as usize, cost.cost(r)))
        .collect();
    if let Some(bad) = keyed.iter().find(|(_, c)| !c.is_finite() || *c < 0.0) {
        return Err(TraceError::InvalidCost(bad.1));
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut demand = vec![0.0; bins];
    for (bin, c) in keyed {
        demand[bin] += c;
    }
    WorkloadSeries::new(start, interval, demand)
}
