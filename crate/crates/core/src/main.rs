use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gausscalc::harness::{emit_report, experiment_list, run_many, verify_all, ExperimentConfig, OutputFormat};
use gausscalc::Error;

#[derive(Parser)]
#[command(name = "gausscalc", version, about = "Gaussian harmonic analysis experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        experiment: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// List the registered experiments.
    List,
    /// Run every registered experiment.
    VerifyAll {
        #[command(flatten)]
        opts: RunOpts,
    },
}

#[derive(Args)]
struct RunOpts {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json, csv or text.
    #[arg(long)]
    format: Option<String>,
    /// Override any config key, e.g. `--set family_size=10`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl RunOpts {
    fn config(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for kv in &self.overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(f) = &self.format {
            cfg.format = f.parse::<OutputFormat>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(names: Option<&str>, opts: &RunOpts) -> Result<i32, Error> {
    let cfg = opts.config()?;
    let job = || match names {
        Some(name) => run_many([name], &cfg),
        None => verify_all(&cfg),
    };
    let report = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(job)?,
        None => job()?,
    };
    emit_report(&report, cfg.format, cfg.out.as_deref())?;
    Ok(report.exit_code())
}

fn usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::UnknownExperiment(_)
            | Error::ReservedExperiment(_)
            | Error::HypothesisViolated { .. }
            | Error::InvalidParameter { .. }
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::List => {
            for e in experiment_list() {
                println!("{:<32} {}", e.id, e.summary);
            }
            Ok(0)
        }
        Command::Run { experiment, opts } => execute(Some(experiment), opts),
        Command::VerifyAll { opts } => execute(None, opts),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if usage_error(&e) { 2 } else { 1 })
        }
    }
}
