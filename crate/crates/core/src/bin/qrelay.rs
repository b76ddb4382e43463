use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use qrelay::harness::{self, ExperimentConfig, MetricsRecord};
use qrelay::protocol::AdversaryStrategy;
use qrelay::Error;

/// Entanglement-keyed message relay simulator.
#[derive(Debug, Parser)]
#[command(name = "qrelay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Degradation sweep.
    Sweep(RunArgs),
    /// Interception run against relayed payloads.
    Adversary {
        #[command(flatten)]
        run: RunArgs,
        /// trace_out or fresh_pairs.
        #[arg(long)]
        strategy: AdversaryStrategy,
    },
    /// Latency comparison against a handshake-based baseline.
    Latency {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solves for the blend factor from an anchor point.
    Calibrate {
        #[arg(long, default_value_t = harness::ANCHOR_DEGRADATION)]
        anchor_x: f64,
        #[arg(long, default_value_t = harness::ANCHOR_FIDELITY)]
        anchor_f: f64,
    },
}

enum Failure {
    Config(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

fn load(run: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::from_path(&run.config, run.seed).map_err(Failure::Config)?;
    if let Some(t) = run.trials {
        cfg.trials = t;
    }
    cfg.validate().map_err(Failure::Config)?;
    Ok(cfg)
}

fn execute<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match workers {
        None => Ok(job()),
        Some(0) => Err(Failure::Config(Error::Config(
            "--workers must be at least 1".into(),
        ))),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Runtime(Error::Config(e.to_string())))?;
            Ok(pool.install(job))
        }
    }
}

fn finish(records: &[MetricsRecord], out: &Path) -> Result<(), Failure> {
    harness::write_csv(records, out).map_err(Failure::Runtime)?;
    eprintln!("wrote {} rows to {}", records.len(), out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sweep(run) => {
            let cfg = load(&run)?;
            eprintln!(
                "sweep: {} points x {} trials, seed {}",
                cfg.degradation_sweep.len(),
                cfg.trials,
                cfg.seed
            );
            let records = execute(run.workers, || harness::run_sweep(&cfg))??;
            finish(&records, &run.out)
        }
        Command::Adversary { run, strategy } => {
            let cfg = load(&run)?;
            eprintln!(
                "adversary ({strategy}): {} points x {} trials, seed {}",
                cfg.degradation_sweep.len(),
                cfg.trials,
                cfg.seed
            );
            let records = execute(run.workers, || harness::run_adversary(&cfg, strategy))??;
            for r in &records {
                if let Some(g) = r.adversary_guess_rate {
                    eprintln!("x={:.3} guess rate {g:.4}", r.x);
                }
            }
            finish(&records, &run.out)
        }
        Command::Latency { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| {
                Failure::Config(Error::Config(format!(
                    "cannot read {}: {e}",
                    config.display()
                )))
            })?;
            let cfg = ExperimentConfig::from_json(&text, Some(0)).map_err(Failure::Config)?;
            let c = harness::latency_compare(&cfg.latency).map_err(Failure::Config)?;
            println!("proposed={:.6}", c.proposed);
            println!("baseline={:.6}", c.baseline);
            println!("reduction={:.6}", c.reduction);
            Ok(())
        }
        Command::Calibrate { anchor_x, anchor_f } => {
            let beta = harness::calibrate_blend(anchor_x, anchor_f).map_err(Failure::Config)?;
            println!("beta={beta:.6}");
            Ok(())
        }
    }
}

impl From<Failure> for ExitCode {
    fn from(f: Failure) -> Self {
        match f {
            Failure::Config(e) => {
                eprintln!("config error: {e}");
                ExitCode::from(1)
            }
            Failure::Runtime(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.into(),
    }
}
