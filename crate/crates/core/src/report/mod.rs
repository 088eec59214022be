//! Comparison tables and summary metrics over simulation results.

mod summary;
mod table;

pub use summary::{
    peak_running, percentile_nearest_rank, release_lag, summary, window_mean, write_summary_csv, Summary,
};
pub use table::{aggregate, comparison_table, Aggregation, Metric, Table};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("no results to report")]
    EmptyResult,
    #[error("result `{0}` is on a different interval grid")]
    GridMismatch(String),
    #[error("group size must be at least 1")]
    InvalidGroup,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{SimConfig, SimRecord, SimResult, VmSpec};

    fn record(t: usize, running: u32, rt: f64, completed: f64) -> SimRecord {
        SimRecord {
            t,
            demand: completed,
            running_vms: running,
            booting_vms: 0,
            draining_vms: 0,
            avg_response_ms: rt,
            completed,
            backlog: 0.0,
            sla_violated: rt > 1200.0,
            cost_cumulative: (t + 1) as f64,
            launched: 0,
            ready: 0,
        }
    }

    fn result(name: &str, records: Vec<SimRecord>) -> SimResult {
        SimResult {
            strategy: name.into(),
            start_time: 0,
            interval_s: 300,
            spec: VmSpec::default(),
            config: SimConfig::default(),
            records,
            audit: Vec::new(),
        }
    }

    fn csv(t: &Table) -> String {
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn single_column_echoes_records() {
        let r = result("a", (0..3).map(|t| record(t, t as u32 + 1, 100.0, 5.0)).collect());
        let t = comparison_table(&[("a", &r)], Metric::RunningVms, 1, 0..10).unwrap();
        assert_eq!(csv(&t), "time,a\n0,1\n1,2\n2,3\n");
    }

    #[test]
    fn four_column_row_layout() {
        let cols = ["dual-lstm", "single-lstm", "des", "fixed-step"];
        let values = [352u32, 510, 119, 40];
        let results: Vec<SimResult> = values
            .iter()
            .zip(cols)
            .map(|(&v, name)| result(name, (0..230).map(|t| record(t, if t == 224 { v } else { 1 }, 1.0, 1.0)).collect()))
            .collect();
        let named: Vec<(&str, &SimResult)> = cols.iter().copied().zip(results.iter()).collect();
        let t = comparison_table(&named, Metric::RunningVms, 1, 224..225).unwrap();
        assert_eq!(csv(&t), "time,dual-lstm,single-lstm,des,fixed-step\n224,352,510,119,40\n");
    }

    #[test]
    fn hourly_folding_rules() {
        // three hours of twelve intervals
        let recs: Vec<SimRecord> = (0..36)
            .map(|t| record(t, (t % 12) as u32 + 1 + (t / 12) as u32, 100.0 + (t % 12) as f64 * 10.0, (t / 12 + 1) as f64))
            .collect();
        let r = result("a", recs);
        let running = comparison_table(&[("a", &r)], Metric::RunningVms, 12, 0..3).unwrap();
        let rt = comparison_table(&[("a", &r)], Metric::AvgResponseMs, 12, 0..3).unwrap();
        let done = comparison_table(&[("a", &r)], Metric::Completed, 12, 0..3).unwrap();
        let col = |t: &Table| t.rows.iter().map(|(_, v)| v[0]).collect::<Vec<f64>>();
        assert_eq!(col(&running), vec![12.0, 13.0, 14.0]);
        assert_eq!(col(&rt), vec![155.0, 155.0, 155.0]);
        assert_eq!(col(&done), vec![12.0, 24.0, 36.0]);
    }

    #[test]
    fn partial_last_group() {
        let r = result("a", (0..5).map(|t| record(t, 1, 1.0, 2.0)).collect());
        let t = comparison_table(&[("a", &r)], Metric::Completed, 2, 0..99).unwrap();
        assert_eq!(csv(&t), "time,a\n0,4\n1,4\n2,2\n");
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let a = result("a", (0..3).map(|t| record(t, 1, 1.0, 1.0)).collect());
        let b = result("b", (0..4).map(|t| record(t, 1, 1.0, 1.0)).collect());
        assert!(matches!(
            comparison_table(&[("a", &a), ("b", &b)], Metric::RunningVms, 1, 0..3),
            Err(ReportError::GridMismatch(n)) if n == "b"
        ));
    }

    #[test]
    fn dat_layout() {
        let r = result("a", (0..2).map(|t| record(t, 3, 1.5, 1.0)).collect());
        let t = comparison_table(&[("a", &r), ("b", &r)], Metric::AvgResponseMs, 1, 0..2).unwrap();
        let mut buf = Vec::new();
        t.write_dat(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# avg_response_ms: time a b\n0 1.5 1.5\n1 1.5 1.5\n");
    }

    #[test]
    fn p95_nearest_rank() {
        let values = [
            13.0, 2.0, 19.0, 7.0, 4.0, 20.0, 1.0, 16.0, 9.0, 11.0, 3.0, 18.0, 6.0, 14.0, 8.0, 17.0, 5.0, 12.0, 10.0, 15.0,
        ];
        assert_eq!(percentile_nearest_rank(&values, 95.0), Some(19.0));
        assert_eq!(percentile_nearest_rank(&values, 100.0), Some(20.0));
        assert_eq!(percentile_nearest_rank(&values, 0.0), Some(1.0));
        assert_eq!(percentile_nearest_rank(&[], 95.0), None);
    }

    #[test]
    fn constant_run_summary() {
        let r = result("a", (0..10).map(|t| record(t, 2, 300.0, 5.0)).collect());
        let s = summary(&r, 1200.0, None).unwrap();
        assert_eq!(s.sla_violation_pct, 0.0);
        assert_eq!(s.mean_rt, 300.0);
        assert_eq!(s.p95_rt, 300.0);
        assert_eq!(s.peak_vms, 2);
        assert_eq!(s.total_cost, 10.0);
        assert_eq!(s.release_lag, None);
    }

    #[test]
    fn summary_is_permutation_stable() {
        let mut recs: Vec<SimRecord> = (0..20).map(|t| record(t, 1 + (t as u32 * 7) % 5, (t * 37 % 20) as f64 * 100.0, 1.0)).collect();
        let a = summary(&result("a", recs.clone()), 1200.0, None).unwrap();
        recs.reverse();
        let b = summary(&result("a", recs), 1200.0, None).unwrap();
        assert_eq!((a.mean_rt, a.p95_rt, a.sla_violation_pct, a.peak_vms), (b.mean_rt, b.p95_rt, b.sla_violation_pct, b.peak_vms));
    }

    #[test]
    fn release_lag_counts_from_peak_end() {
        // spike demand over [10, 16), peak ends at 13, fleet peak 40
        let demand = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 8.0, 10.0, 9.0, 6.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        let running = [10, 10, 10, 10, 10, 10, 10, 10, 10, 10, 20, 40, 40, 40, 40, 30, 13, 11, 10, 10];
        let recs: Vec<SimRecord> = (0..20)
            .map(|t| SimRecord {
                demand: demand[t],
                ..record(t, running[t], 1.0, demand[t])
            })
            .collect();
        let r = result("a", recs);
        assert_eq!(release_lag(&r, 10..16), Some(3));
        assert_eq!(release_lag(&r, 18..20), None);
        assert_eq!(release_lag(&r, 20..30), None);
    }
}
