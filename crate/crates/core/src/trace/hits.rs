use std::io::Read;

use super::{TraceError, WorkloadSeries};

/// Hit counts per fixed interval, as published for the Slashdot flash crowd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitSeries {
    pub start_time: i64,
    pub interval: u32,
    pub hits: Vec<u64>,
}

impl HitSeries {
    /// Reads a `time_seconds,hits` CSV. Rows must be uniformly spaced and
    /// ascending; the spacing becomes the series interval.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, TraceError> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader.headers()?.clone();
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["time_seconds", "hits"] {
            return Err(TraceError::BadHitSeries("expected header time_seconds,hits".into()));
        }
        let mut times = Vec::new();
        let mut hits = Vec::new();
        for (row, result) in reader.records().enumerate() {
            let rec = result?;
            let parse_err = |what: &str| TraceError::BadHitSeries(format!("row {row}: bad {what}"));
            let t: i64 = rec
                .get(0)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| parse_err("time_seconds"))?;
            let h: u64 = rec
                .get(1)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| parse_err("hits"))?;
            times.push(t);
            hits.push(h);
        }
        if times.len() < 2 {
            return Err(TraceError::BadHitSeries(
                "need at least two rows to infer the interval".into(),
            ));
        }
        let step = times[1] - times[0];
        if step <= 0 || step > i64::from(u32::MAX) {
            return Err(TraceError::BadHitSeries("timestamps must be ascending".into()));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] - w[0] != step) {
            return Err(TraceError::BadHitSeries(format!(
                "row {}: non-uniform spacing",
                i + 1
            )));
        }
        Ok(Self {
            start_time: times[0],
            interval: step as u32,
            hits,
        })
    }

    pub fn total(&self) -> u64 {
        self.hits.iter().sum()
    }

    /// Re-bins the hits onto `interval`-second bins aligned with the first
    /// hit bin. Mass is split proportionally to overlap, so the total is kept;
    /// when `interval` is a multiple of the source interval this is a plain sum.
    pub fn resample(&self, interval: u32) -> Vec<f64> {
        if self.hits.is_empty() || interval == 0 {
            return Vec::new();
        }
        let src = u64::from(self.interval);
        let dst = u64::from(interval);
        let span = src * self.hits.len() as u64;
        let bins = span.div_ceil(dst) as usize;
        let mut out = vec![0.0; bins];
        for (i, &h) in self.hits.iter().enumerate() {
            let lo = i as u64 * src;
            let hi = lo + src;
            let mut at = lo;
            while at < hi {
                let bin = at / dst;
                let bin_end = ((bin + 1) * dst).min(hi);
                out[bin as usize] += h as f64 * (bin_end - at) as f64 / src as f64;
                at = bin_end;
            }
        }
        out
    }
}

/// Adds `spike * cost_per_hit` (resampled to the base interval) onto `base`
/// starting at interval index `offset`. Everything else is left untouched.
pub fn splice_slashdot(
    base: &WorkloadSeries,
    spike: &HitSeries,
    offset: usize,
    cost_per_hit: f64,
) -> Result<WorkloadSeries, TraceError> {
    let extra = spike.resample(base.interval());
    if offset + extra.len() > base.len() {
        return Err(TraceError::OutOfRange {
            offset,
            len: extra.len(),
            base_len: base.len(),
        });
    }
    let mut demand = base.demand().to_vec();
    for (slot, add) in demand[offset..].iter_mut().zip(&extra) {
        *slot += add * cost_per_hit;
    }
    WorkloadSeries::new(base.start_time(), base.interval(), demand)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hits(interval: u32, hits: Vec<u64>) -> HitSeries {
        HitSeries {
            start_time: 0,
            interval,
            hits,
        }
    }

    #[test]
    fn zero_spike_is_identity() {
        let base = WorkloadSeries::new(0, 60, vec![3.0, 1.0, 4.0, 1.0]).unwrap();
        let out = splice_slashdot(&base, &hits(60, vec![0, 0]), 1, 2.0).unwrap();
        assert_eq!(out, base);
    }

    #[test]
    fn adds_at_offset() {
        let base = WorkloadSeries::new(0, 60, vec![1.0, 1.0, 1.0]).unwrap();
        let out = splice_slashdot(&base, &hits(60, vec![5]), 1, 1.0).unwrap();
        assert_eq!(out.demand(), &[1.0, 6.0, 1.0]);
    }

    #[test]
    fn out_of_range() {
        let base = WorkloadSeries::new(0, 60, vec![1.0, 1.0, 1.0]).unwrap();
        let err = splice_slashdot(&base, &hits(60, vec![1, 1]), 2, 1.0).unwrap_err();
        assert!(matches!(err, TraceError::OutOfRange { offset: 2, len: 2, base_len: 3 }));
    }

    #[test]
    fn resample_sums_whole_multiples() {
        let s = hits(300, vec![1, 2, 3, 4, 5]);
        assert_eq!(s.resample(600), vec![3.0, 7.0, 5.0]);
        assert_eq!(s.resample(300), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn resample_splits_fractional_bins() {
        let s = hits(300, vec![4, 8]);
        let out = s.resample(200);
        assert_eq!(out.len(), 3);
        let total: f64 = out.iter().sum();
        assert!((total - 12.0).abs() < 1e-12);
        assert!((out[0] - 4.0 * 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn csv_validation() {
        let good = "time_seconds,hits\n100,1\n400,2\n700,0\n";
        let s = HitSeries::read_csv(good.as_bytes()).unwrap();
        assert_eq!(s.interval, 300);
        assert_eq!(s.start_time, 100);
        assert_eq!(s.hits, vec![1, 2, 0]);
        assert!(HitSeries::read_csv("time_seconds,hits\n100,1\n400,2\n800,0\n".as_bytes()).is_err());
        assert!(HitSeries::read_csv("t,h\n100,1\n400,2\n".as_bytes()).is_err());
        assert!(HitSeries::read_csv("time_seconds,hits\n100,1\n".as_bytes()).is_err());
    }
}
