//! Access-log and hit-trace ingestion, and aggregation into a demand series.

mod aggregate;
mod clf;
mod hits;
mod series;

pub use aggregate::{aggregate_demand, BytesCost, CpuCostModel, UnitCost};
pub use clf::{load_trace, parse_clf_line, LoadedTrace, LogRecord, MalformedLine};
pub use hits::{splice_slashdot, HitSeries};
pub use series::WorkloadSeries;

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("no records to aggregate")]
    EmptyInput,
    #[error("interval must be a positive number of seconds")]
    InvalidInterval,
    #[error("demand at index {index} is negative or not finite")]
    InvalidDemand { index: usize },
    #[error("cost model produced an invalid cost {0}")]
    InvalidCost(f64),
    #[error("spike of {len} intervals at offset {offset} runs past the end of a {base_len}-interval series")]
    OutOfRange {
        offset: usize,
        len: usize,
        base_len: usize,
    },
    #[error("hit series: {0}")]
    BadHitSeries(String),
    #[error("workload csv: {0}")]
    BadCsv(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
