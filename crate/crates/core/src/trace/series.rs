use std::io::{Read, Write};

use super::TraceError;

/// Uniformly sampled CPU demand (`CPU_H`), one value per interval.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSeries {
    start_time: i64,
    interval: u32,
    demand: Vec<f64>,
}

impl WorkloadSeries {
    pub fn new(start_time: i64, interval: u32, demand: Vec<f64>) -> Result<Self, TraceError> {
        if interval == 0 {
            return Err(TraceError::InvalidInterval);
        }
        if demand.is_empty() {
            return Err(TraceError::EmptyInput);
        }
        if let Some(i) = demand.iter().position(|d| !d.is_finite() || *d < 0.0) {
            return Err(TraceError::InvalidDemand { index: i });
        }
        Ok(Self {
            start_time,
            interval,
            demand,
        })
    }

    pub fn start_time(&self) -> i64 {
        self.start_time
    }

    /// Interval length in seconds.
    pub fn interval(&self) -> u32 {
        self.interval
    }

    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    pub fn len(&self) -> usize {
        self.demand.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demand.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.demand.iter().sum()
    }

    /// Whole intervals contained in `seconds`.
    pub fn intervals_per(&self, seconds: u64) -> usize {
        (seconds / u64::from(self.interval)) as usize
    }

    /// Writes `index,start_epoch,interval_s,demand`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,start_epoch,interval_s,demand")?;
        for (i, d) in self.demand.iter().enumerate() {
            let start = self.start_time + i as i64 * i64::from(self.interval);
            writeln!(out, "{i},{start},{},{d}", self.interval)?;
        }
        out.flush()
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, TraceError> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["index", "start_epoch", "interval_s", "demand"] {
            return Err(TraceError::BadCsv(
                "expected header index,start_epoch,interval_s,demand".into(),
            ));
        }
        let mut start = None;
        let mut interval = None;
        let mut demand = Vec::new();
        for (row, result) in reader.records().enumerate() {
            let rec = result?;
            let field = |i: usize| -> Result<&str, TraceError> {
                rec.get(i)
                    .ok_or_else(|| TraceError::BadCsv(format!("row {row}: missing column {i}")))
            };
            let bad = |what: &str| TraceError::BadCsv(format!("row {row}: bad {what}"));
            let index: usize = field(0)?.trim().parse().map_err(|_| bad("index"))?;
            let epoch: i64 = field(1)?.trim().parse().map_err(|_| bad("start_epoch"))?;
            let step: u32 = field(2)?.trim().parse().map_err(|_| bad("interval_s"))?;
            let value: f64 = field(3)?.trim().parse().map_err(|_| bad("demand"))?;
            if index != row {
                return Err(bad("index (rows must be consecutive from 0)"));
            }
            let s = *start.get_or_insert(epoch);
            let iv = *interval.get_or_insert(step);
            if step != iv || epoch != s + row as i64 * i64::from(iv) {
                return Err(bad("grid (non-uniform sampling)"));
            }
            demand.push(value);
        }
        Self::new(start.unwrap_or(0), interval.unwrap_or(0).max(1), demand)
    }
}
