use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::autoscaler::{DualLstmScaler, ScalingPolicy, SingleLstmScaler};
use crate::predictor::{lstm_train, write_checkpoint, Forecaster, SlidingWindow, Trained};
use crate::report::{comparison_table, summary, write_summary_csv, Metric};
use crate::simulator::{run_simulation, DesThresholdScaler, FixedStepScaler, SimResult};
use crate::trace::{aggregate_demand, load_trace, HitSeries, TraceError, WorkloadSeries};

use super::{Scenario, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    DualLstm,
    SingleLstm,
    Des,
    FixedStep,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::DualLstm, Strategy::SingleLstm, Strategy::Des, Strategy::FixedStep];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::DualLstm => "dual-lstm",
            Strategy::SingleLstm => "single-lstm",
            Strategy::Des => "des",
            Strategy::FixedStep => "fixed-step",
        }
    }

    pub fn needs_models(self) -> bool {
        matches!(self, Strategy::DualLstm | Strategy::SingleLstm)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

/// The demand series a scenario runs on.
#[derive(Debug, Clone)]
pub struct Workloads {
    /// Aggregated access log.
    pub base: WorkloadSeries,
    /// `base` with the spike added; equals `base` when there is no spike.
    pub spiked: WorkloadSeries,
    /// Spike demand on the base grid, already multiplied by the hit cost.
    pub spike: Vec<f64>,
    /// Intervals of `spiked` that carry spike demand.
    pub spike_window: Range<usize>,
    pub records: usize,
    pub skipped: usize,
}

fn open(path: &Path) -> Result<BufReader<File>, ScenarioError> {
    File::open(path).map(BufReader::new).map_err(|source| ScenarioError::DataIo {
        path: path.to_path_buf(),
        source,
    })
}

fn trace_err(path: &Path) -> impl FnOnce(TraceError) -> ScenarioError + '_ {
    move |source| ScenarioError::Trace {
        path: path.to_path_buf(),
        source,
    }
}

/// Parses and aggregates the access log at `path`.
pub fn ingest(path: &Path, interval: u32, sc: &Scenario) -> Result<(WorkloadSeries, usize, usize), ScenarioError> {
    let loaded = load_trace(open(path)?).map_err(trace_err(path))?;
    let cost = sc.config.data.cost.build();
    let series = aggregate_demand(&loaded.records, interval, cost.as_ref()).map_err(trace_err(path))?;
    Ok((series, loaded.records.len(), loaded.skipped))
}

pub fn build_workloads(sc: &Scenario) -> Result<Workloads, ScenarioError> {
    let c = &sc.config;
    let trace_path = sc.resolve(&c.data.trace);
    let (base, records, skipped) = ingest(&trace_path, c.interval, sc)?;
    let Some(spike_path) = c.data.spike.as_ref().map(|p| sc.resolve(p)) else {
        return Ok(Workloads {
            spiked: base.clone(),
            base,
            spike: Vec::new(),
            spike_window: 0..0,
            records,
            skipped,
        });
    };
    let hits = HitSeries::read_csv(open(&spike_path)?).map_err(trace_err(&spike_path))?;
    let offset = (c.data.splice_hour * 3600 / u64::from(c.interval)) as usize;
    let spiked = crate::trace::splice_slashdot(&base, &hits, offset, c.data.cost_per_hit).map_err(trace_err(&spike_path))?;
    let spike: Vec<f64> = hits.resample(c.interval).iter().map(|h| h * c.data.cost_per_hit).collect();
    Ok(Workloads {
        spike_window: offset..offset + spike.len(),
        base,
        spiked,
        spike,
        records,
        skipped,
    })
}

/// Copies of `spike` laid end to end, each scaled by an amplitude drawn
/// uniformly from `amplitude`.
pub fn slashdot_corpus(spike: &[f64], tiles: usize, amplitude: [f64; 2], seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(spike.len() * tiles);
    for _ in 0..tiles {
        let a = if amplitude[0] < amplitude[1] {
            rng.gen_range(amplitude[0]..=amplitude[1])
        } else {
            amplitude[0]
        };
        out.extend(spike.iter().map(|v| v * a));
    }
    out
}

#[derive(Debug, Clone)]
pub struct TrainedModels {
    pub normal: Trained<f64>,
    pub slashdot: Trained<f64>,
    pub single: Trained<f64>,
}

impl TrainedModels {
    pub fn named(&self) -> [(&'static str, &Trained<f64>); 3] {
        [("normal", &self.normal), ("slashdot", &self.slashdot), ("single", &self.single)]
    }
}

pub fn sliding_window(sc: &Scenario) -> Result<SlidingWindow, ScenarioError> {
    Ok(SlidingWindow::new(sc.config.predictor.window_length, sc.config.vm.startup_delay)?)
}

/// Training series for the normal, spike-only and combined models.
pub fn training_sets(sc: &Scenario, w: &Workloads) -> Result<[Vec<f64>; 3], ScenarioError> {
    let c = &sc.config;
    let pre_spike = if w.spike_window.is_empty() {
        w.base.len()
    } else {
        w.spike_window.start
    };
    let cap = c
        .predictor
        .normal_train_hours
        .map_or(pre_spike, |h| (h * 3600 / u64::from(c.interval)) as usize);
    let normal = w.base.demand()[..cap.min(w.base.len())].to_vec();
    if w.spike.is_empty() {
        return Err(ScenarioError::Invalid("LSTM strategies need a spike trace".into()));
    }
    let slashdot = slashdot_corpus(
        &w.spike,
        c.predictor.slashdot_tiles,
        c.predictor.slashdot_amplitude,
        c.seed.wrapping_add(3),
    );
    let mut single = normal.clone();
    single.extend_from_slice(&slashdot);
    Ok([normal, slashdot, single])
}

/// Trains the three networks concurrently. Each has its own seed derived
/// from the scenario seed, so the outcome does not depend on scheduling.
pub fn train_models(sc: &Scenario, w: &Workloads) -> Result<TrainedModels, ScenarioError> {
    let win = sliding_window(sc)?;
    let [normal, slashdot, single] = training_sets(sc, w)?;
    let seed = sc.config.seed;
    let results = std::thread::scope(|s| {
        let jobs: Vec<_> = [(normal, 0u64), (slashdot, 1), (single, 2)]
            .into_iter()
            .map(|(series, k)| {
                let cfg = sc.train_config(seed.wrapping_add(k));
                s.spawn(move || lstm_train(&series, win, &cfg))
            })
            .collect();
        jobs.into_iter()
            .map(|j| j.join().expect("training thread panicked"))
            .collect::<Vec<_>>()
    });
    let mut it = results.into_iter();
    let mut next = || it.next().expect("three training jobs");
    Ok(TrainedModels {
        normal: next()?,
        slashdot: next()?,
        single: next()?,
    })
}

pub fn build_policy(
    strategy: Strategy,
    sc: &Scenario,
    models: Option<&TrainedModels>,
) -> Result<Box<dyn ScalingPolicy>, ScenarioError> {
    let c = &sc.config;
    let plan = sc.capacity_plan();
    let need = || models.ok_or_else(|| ScenarioError::Invalid(format!("{strategy} needs trained models")));
    Ok(match strategy {
        Strategy::DualLstm => {
            let m = need()?;
            let normal: Arc<dyn Forecaster> = Arc::new(m.normal.model.clone());
            let slashdot: Arc<dyn Forecaster> = Arc::new(m.slashdot.model.clone());
            Box::new(DualLstmScaler::new(
                normal,
                slashdot,
                sliding_window(sc)?,
                c.scaler.clone(),
                plan,
            )?)
        }
        Strategy::SingleLstm => {
            let m = need()?;
            let single: Arc<dyn Forecaster> = Arc::new(m.single.model.clone());
            Box::new(SingleLstmScaler::new(single, sliding_window(sc)?, c.scaler.clone(), plan)?)
        }
        Strategy::Des => Box::new(DesThresholdScaler::new(c.des.clone(), plan, c.vm.startup_delay)?),
        Strategy::FixedStep => Box::new(FixedStepScaler::new(c.fixed_step.clone(), c.vm.capacity, c.interval)?),
    })
}

pub fn simulate(
    strategy: Strategy,
    sc: &Scenario,
    w: &Workloads,
    models: Option<&TrainedModels>,
) -> Result<SimResult, ScenarioError> {
    let mut policy = build_policy(strategy, sc, models)?;
    Ok(run_simulation(&w.spiked, policy.as_mut(), &sc.config.vm, &sc.sim_config())?)
}

/// Workloads, models and one result per strategy, in [`Strategy::ALL`] order.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub workloads: Workloads,
    pub models: TrainedModels,
    pub results: Vec<SimResult>,
}

pub fn run_comparison(sc: &Scenario) -> Result<Comparison, ScenarioError> {
    let workloads = build_workloads(sc)?;
    let models = train_models(sc, &workloads)?;
    let results = std::thread::scope(|s| {
        let jobs: Vec<_> = Strategy::ALL
            .into_iter()
            .map(|k| {
                let (w, m) = (&workloads, &models);
                s.spawn(move || simulate(k, sc, w, Some(m)))
            })
            .collect();
        jobs.into_iter()
            .map(|j| j.join().expect("simulation thread panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(Comparison {
        workloads,
        models,
        results,
    })
}

/// Writes `path` through a temporary sibling so readers never see a
/// partial file.
pub fn write_atomic(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), ScenarioError> {
    let out_err = |source| ScenarioError::Output {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut w = BufWriter::new(File::create(&tmp).map_err(out_err)?);
    body(&mut w).and_then(|_| w.flush()).map_err(out_err)?;
    drop(w);
    std::fs::rename(&tmp, path).map_err(out_err)
}

pub fn write_model_outputs(models: &TrainedModels, out_dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
    let mut written = Vec::new();
    for (name, t) in models.named() {
        let log = out_dir.join(format!("training_{name}.csv"));
        write_atomic(&log, |w| t.report.write_csv(w))?;
        let ckpt = out_dir.join(format!("model_{name}.ckpt"));
        write_atomic(&ckpt, |w| {
            write_checkpoint(&t.model, w).map_err(|e| std::io::Error::other(e.to_string()))
        })?;
        written.extend([log, ckpt]);
    }
    Ok(written)
}

pub fn write_result(result: &SimResult, out_dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
    let sim = out_dir.join(format!("sim_{}.csv", result.strategy));
    write_atomic(&sim, |w| result.write_csv(w))?;
    let audit = out_dir.join(format!("audit_{}.csv", result.strategy));
    write_atomic(&audit, |w| result.write_audit_csv(w))?;
    Ok(vec![sim, audit])
}

/// Table rows selected by the report section, in groups.
pub fn report_rows(sc: &Scenario, len: usize) -> Range<usize> {
    let r = &sc.config.report;
    let rows = len.div_ceil(sc.group());
    r.window_start.unwrap_or(0)..r.window_end.unwrap_or(rows)
}

/// Writes per-strategy results, comparison tables (CSV and `.dat`), the
/// summary, the workload and the training artifacts into `out_dir`.
pub fn write_comparison(cmp: &Comparison, sc: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
    std::fs::create_dir_all(out_dir).map_err(|source| ScenarioError::Output {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    let workload = out_dir.join("workload.csv");
    write_atomic(&workload, |w| cmp.workloads.spiked.write_csv(w))?;
    written.push(workload);
    written.extend(write_model_outputs(&cmp.models, out_dir)?);
    for r in &cmp.results {
        written.extend(write_result(r, out_dir)?);
    }

    let named: Vec<(&str, &SimResult)> = cmp.results.iter().map(|r| (r.strategy.as_str(), r)).collect();
    let rows = report_rows(sc, cmp.workloads.spiked.len());
    for metric in [Metric::RunningVms, Metric::AvgResponseMs, Metric::Completed] {
        let table = comparison_table(&named, metric, sc.group(), rows.clone())?;
        let csv = out_dir.join(format!("table_{}.csv", metric.name()));
        write_atomic(&csv, |w| table.write_csv(w))?;
        let dat = out_dir.join(format!("table_{}.dat", metric.name()));
        write_atomic(&dat, |w| table.write_dat(w))?;
        written.extend([csv, dat]);
    }

    let spike = Some(cmp.workloads.spike_window.clone()).filter(|s| !s.is_empty());
    let summaries = cmp
        .results
        .iter()
        .map(|r| Ok((r.strategy.as_str(), summary(r, sc.config.service.slo_ms, spike.clone())?)))
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    let path = out_dir.join("summary.csv");
    write_atomic(&path, |w| write_summary_csv(&summaries, w))?;
    written.push(path);
    Ok(written)
}
