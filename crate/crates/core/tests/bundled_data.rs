//! Frozen facts about the bundled traces, taken from a one-time independent
//! audit of the files.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use autoscale_core::scenario::{build_workloads, Scenario};
use autoscale_core::trace::{aggregate_demand, load_trace, HitSeries, UnitCost};

const HOURLY: [u32; 264] = [
    14, 10, 10, 13, 16, 18, 28, 38, 40, 57, 48, 66, 73, 67, 74, 65, 57, 60, 54, 54,
    43, 34, 33, 15, 9, 12, 11, 14, 12, 16, 27, 30, 47, 51, 60, 48, 64, 88, 83, 71,
    75, 62, 58, 50, 44, 37, 24, 33, 15, 14, 10, 9, 13, 15, 26, 19, 38, 52, 42, 63,
    78, 87, 78, 75, 67, 61, 56, 46, 48, 37, 17, 13, 17, 8, 4, 12, 10, 21, 27, 54,
    35, 46, 57, 57, 60, 59, 69, 63, 63, 70, 56, 43, 34, 30, 19, 15, 9, 6, 4, 7,
    10, 7, 16, 18, 29, 24, 27, 37, 39, 38, 48, 40, 46, 36, 35, 30, 27, 23, 20, 14,
    12, 7, 4, 10, 8, 11, 16, 26, 19, 37, 28, 33, 55, 41, 46, 30, 37, 49, 39, 38,
    26, 18, 10, 9, 13, 11, 11, 10, 16, 18, 26, 29, 36, 44, 50, 53, 79, 54, 72, 69,
    54, 60, 52, 38, 27, 30, 21, 19, 10, 8, 3, 13, 15, 19, 27, 28, 50, 45, 54, 62,
    80, 65, 63, 58, 69, 61, 51, 47, 43, 38, 13, 13, 18, 10, 10, 18, 14, 16, 32, 34,
    38, 56, 56, 66, 73, 76, 56, 78, 60, 55, 56, 48, 45, 28, 25, 31, 12, 12, 10, 9,
    21, 15, 30, 33, 36, 52, 50, 70, 64, 76, 73, 60, 58, 67, 62, 58, 44, 38, 25, 20,
    16, 12, 13, 15, 14, 16, 28, 36, 47, 43, 62, 71, 70, 78, 64, 69, 62, 60, 54, 53,
    46, 33, 27, 13,
];

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

#[test]
fn excerpt_counts() {
    let loaded = load_trace(BufReader::new(File::open(data("nasa_style_excerpt.log")).unwrap())).unwrap();
    assert_eq!(loaded.records.len(), 9943);
    assert_eq!(loaded.skipped, 57);
    let first = loaded.records.iter().map(|r| r.timestamp).min().unwrap();
    let last = loaded.records.iter().map(|r| r.timestamp).max().unwrap();
    assert_eq!((first - first % 3600, last), (807_249_600, 808_199_229));
}

#[test]
fn excerpt_hourly_profile() {
    let loaded = load_trace(BufReader::new(File::open(data("nasa_style_excerpt.log")).unwrap())).unwrap();
    let series = aggregate_demand(&loaded.records, 3600, &UnitCost(1.0)).unwrap();
    assert_eq!(series.start_time(), 807_249_600);
    let expected: Vec<f64> = HOURLY.iter().map(|&h| f64::from(h)).collect();
    assert_eq!(series.demand(), expected.as_slice());
    assert_eq!(series.total(), 9943.0);
}

#[test]
fn spike_trace_mass() {
    let hits = HitSeries::read_csv(File::open(data("slashdot_hits.csv")).unwrap()).unwrap();
    assert_eq!(hits.interval, 300);
    assert_eq!(hits.hits.len(), 360);
    assert_eq!(hits.total(), 9741);
    assert_eq!(hits.resample(600).iter().sum::<f64>(), 9741.0);
}

#[test]
fn bundled_splice_adds_exactly_the_spike() {
    let sc = Scenario::load(&data("scenario.toml")).unwrap();
    let w = build_workloads(&sc).unwrap();
    assert_eq!((w.records, w.skipped), (9943, 57));
    assert_eq!(w.spiked.total() - w.base.total(), 9741.0);
    // hour 223 at 600-second intervals
    assert_eq!(w.spike_window, 1338..1518);
    let untouched = |t: usize| w.spiked.demand()[t] == w.base.demand()[t];
    assert!((0..1338).chain(1518..w.base.len()).all(untouched));
}
