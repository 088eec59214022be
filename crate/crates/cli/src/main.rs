use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use autoscale_core::predictor::{gradient_check, random_case};
use autoscale_core::report::summary;
use autoscale_core::scenario::{
    build_workloads, ingest, simulate, train_models, write_atomic, write_model_outputs, write_result, Scenario,
    ScenarioError, Strategy,
};

#[derive(Parser)]
#[command(name = "autoscale", version, about = "Trace-driven auto-scaling laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an access log and write the aggregated demand series.
    Ingest(Common),
    /// Train the forecasting models and write checkpoints and loss logs.
    Train(Common),
    /// Run one strategy on the scenario workload.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
    },
    /// Run every strategy and write the comparison tables.
    Compare(Common),
    /// Check the analytic LSTM gradient against finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        hidden: usize,
        #[arg(long, default_value_t = 8)]
        window: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file; required by every subcommand except `ingest`.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Aggregation interval in seconds.
    #[arg(long)]
    interval: Option<u32>,
    /// Access log, overriding the scenario's.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Hit trace CSV, overriding the scenario's.
    #[arg(long)]
    spike: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    DualLstm,
    SingleLstm,
    Des,
    FixedStep,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::DualLstm => Strategy::DualLstm,
            StrategyArg::SingleLstm => Strategy::SingleLstm,
            StrategyArg::Des => Strategy::Des,
            StrategyArg::FixedStep => Strategy::FixedStep,
        }
    }
}

enum Failure {
    Config(String),
    Data(String),
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

impl Common {
    /// Loads the scenario and applies the command-line overrides. Paths
    /// given on the command line are taken relative to the working
    /// directory.
    fn scenario(&self) -> Result<Scenario, Failure> {
        let path = self
            .scenario
            .as_ref()
            .ok_or_else(|| Failure::Config("--scenario is required".into()))?;
        let mut sc = Scenario::load(path)?;
        self.apply(&mut sc)?;
        Ok(sc)
    }

    fn apply(&self, sc: &mut Scenario) -> Result<(), Failure> {
        let cwd = |p: &Path| std::env::current_dir().map(|d| d.join(p)).unwrap_or_else(|_| p.to_path_buf());
        if let Some(seed) = self.seed {
            sc.config.seed = seed;
        }
        if let Some(interval) = self.interval {
            sc.config.interval = interval;
        }
        if let Some(t) = &self.trace {
            sc.config.data.trace = cwd(t);
        }
        if let Some(s) = &self.spike {
            sc.config.data.spike = Some(cwd(s));
        }
        sc.validate()?;
        Ok(())
    }

    fn out_dir(&self) -> Result<&Path, Failure> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| Failure::Data(format!("cannot create {}: {e}", self.out_dir.display())))?;
        Ok(&self.out_dir)
    }
}

fn run_ingest(c: &Common) -> Result<(), Failure> {
    let sc = match &c.scenario {
        Some(_) => c.scenario()?,
        None => {
            let trace = c
                .trace
                .clone()
                .ok_or_else(|| Failure::Config("ingest needs --trace or --scenario".into()))?;
            let mut sc = Scenario::from_toml("[data]\ntrace = \"\"\n", PathBuf::new())?;
            sc.config.data.trace = trace;
            c.apply(&mut sc)?;
            sc
        }
    };
    let out = c.out_dir()?;
    let path = sc.resolve(&sc.config.data.trace);
    let (series, records, skipped) = ingest(&path, sc.config.interval, &sc)?;
    let dest = out.join("workload.csv");
    write_atomic(&dest, |w| series.write_csv(w))?;
    println!(
        "records {records} skipped {skipped} intervals {} -> {}",
        series.len(),
        dest.display()
    );
    Ok(())
}

fn run_train(c: &Common) -> Result<(), Failure> {
    let sc = c.scenario()?;
    let out = c.out_dir()?;
    let w = build_workloads(&sc)?;
    let models = train_models(&sc, &w)?;
    write_model_outputs(&models, out)?;
    for (name, t) in models.named() {
        let mse = t.report.final_mse().unwrap_or(f64::NAN);
        let mape = t.report.holdout_mape.map_or("-".to_string(), |m| format!("{m:.3}"));
        println!("{name}: final mse {mse:.6} holdout mape {mape}%");
    }
    Ok(())
}

fn run_simulate(c: &Common, strategy: Strategy) -> Result<(), Failure> {
    let sc = c.scenario()?;
    let out = c.out_dir()?;
    let w = build_workloads(&sc)?;
    let models = if strategy.needs_models() {
        Some(train_models(&sc, &w)?)
    } else {
        None
    };
    let result = simulate(strategy, &sc, &w, models.as_ref())?;
    write_result(&result, out)?;
    let spike = Some(w.spike_window.clone()).filter(|s| !s.is_empty());
    let s = summary(&result, sc.config.service.slo_ms, spike).map_err(ScenarioError::from)?;
    println!(
        "{strategy}: mean rt {:.1} ms, p95 {:.1} ms, sla violations {:.2}%, cost {}, peak vms {}",
        s.mean_rt, s.p95_rt, s.sla_violation_pct, s.total_cost, s.peak_vms
    );
    Ok(())
}

fn run_compare(c: &Common) -> Result<(), Failure> {
    let sc = c.scenario()?;
    let out = c.out_dir()?;
    let cmp = autoscale_core::scenario::run_comparison(&sc)?;
    let written = autoscale_core::scenario::write_comparison(&cmp, &sc, out)?;
    println!("wrote {} files to {}", written.len(), out.display());
    Ok(())
}

fn run_gradcheck(seed: u64, hidden: usize, window: usize, out_dir: Option<&Path>) -> Result<bool, Failure> {
    let (model, sample) = random_case(seed, hidden, window).map_err(|e| Failure::Config(e.to_string()))?;
    let err = gradient_check(&model, &sample);
    let pass = err < 1e-4;
    let line = format!("max relative gradient error {err:.3e} ({})", if pass { "ok" } else { "FAIL" });
    println!("{line}");
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Data(format!("cannot create {}: {e}", dir.display())))?;
        write_atomic(&dir.join("gradcheck.txt"), |w| {
            use std::io::Write;
            writeln!(w, "{line}")
        })?;
    }
    Ok(pass)
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code: 0 on success, 1 for configuration problems, 2 for data
/// problems or a failed gradient check.
pub fn run_cli<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Ingest(c) => run_ingest(c),
        Command::Train(c) => run_train(c),
        Command::Simulate { common, strategy } => run_simulate(common, (*strategy).into()),
        Command::Compare(c) => run_compare(c),
        Command::Gradcheck {
            seed,
            hidden,
            window,
            out_dir,
        } => match run_gradcheck(*seed, *hidden, *window, out_dir.as_deref()) {
            Ok(true) => Ok(()),
            Ok(false) => return 2,
            Err(e) => Err(e),
        },
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run_cli(std::env::args_os()))
}
