use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mpal::emsa::EmsaReport;
use mpal::harness::{replay_emsa, run_experiment, ExperimentConfig, ExperimentKind, Outcome};
use mpal::{Error, Result};

/// Localization experiments for interacting particles on the integer line.
#[derive(Parser, Debug)]
#[command(name = "mpal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Probability that a cube is m-localizing, swept over N, L and lambda.
    Localize(Common),
    /// Empirical distribution of the spectral distance of two distant cubes.
    Wegner(Common),
    /// One multiscale step per seed with per-seed JSON reports.
    Emsa {
        #[command(flatten)]
        common: Common,
        /// Rerun the seed of an existing report and compare the output.
        #[arg(long, value_name = "REPORT")]
        replay: Option<PathBuf>,
    },
    /// Scale, mass and decay exponent schedules.
    Schedule(Common),
    /// Cover of a cube by smaller cubes and their interactivity.
    Geometry(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON experiment description; defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Base seed; trial i uses split(seed, i).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory (default: `out`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Largest matrix dimension allowed.
    #[arg(long)]
    cap: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.run.base_seed = seed;
        }
        if let Some(trials) = self.trials {
            config.run.trials = trials;
        }
        if let Some(out) = &self.out {
            config.run.out = Some(out.clone());
        }
        if let Some(workers) = self.workers {
            config.run.workers = workers;
        }
        if let Some(cap) = self.cap {
            config.run.cap = cap;
        }
        config.validate()?;
        Ok(config)
    }
}

fn out_dir(config: &ExperimentConfig) -> PathBuf {
    config.run.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn emit(outcome: &Outcome, config: &ExperimentConfig) -> Result<()> {
    for path in outcome.emit(&out_dir(config))? {
        println!("{}", path.display());
    }
    Ok(())
}

fn replay(common: &Common, path: &PathBuf) -> Result<()> {
    let config = common.load()?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })?;
    let report = EmsaReport::from_json(&text)?;
    let again = replay_emsa(&config, &report)?.to_json()?;
    let name = format!("replay/seed_{}.json", report.seed);
    emit(
        &Outcome {
            tables: vec![],
            documents: vec![(name, again.clone())],
        },
        &config,
    )?;
    if again != text {
        return Err(Error::Numerical {
            message: "replayed report differs from the original".into(),
            provenance: path.display().to_string(),
        });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let (kind, common) = match &cli.command {
        Command::Localize(c) => (ExperimentKind::Localize, c),
        Command::Wegner(c) => (ExperimentKind::Wegner, c),
        Command::Emsa { common, replay: Some(path) } => return replay(common, path),
        Command::Emsa { common, replay: None } => (ExperimentKind::Emsa, common),
        Command::Schedule(c) => (ExperimentKind::Schedule, c),
        Command::Geometry(c) => (ExperimentKind::Geometry, c),
    };
    let config = common.load()?;
    log::info!("running {} with {} trials", kind.name(), config.run.trials);
    let started = std::time::Instant::now();
    let outcome = run_experiment(kind, &config)?;
    log::debug!("{} finished in {:.3?}", kind.name(), started.elapsed());
    emit(&outcome, &config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MPAL_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
