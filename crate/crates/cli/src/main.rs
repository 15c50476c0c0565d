//! `lcrit`: runs experiments from a TOML config and writes CSV/JSON reports.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::{ExperimentConfig, Format};
use crate::report::Report;

#[derive(Parser)]
#[command(name = "lcrit", version, about = "Value-distribution experiments for L-functions close to Re(s) = 1/2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML (or `.json`) experiment config; defaults apply when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Collect the deterministic and random measures.
    Sample,
    /// Discrepancy between two measures, with its permutation noise floor.
    Discrepancy {
        /// Two measure CSVs; collected from the config when omitted.
        #[arg(num_args = 2)]
        inputs: Vec<PathBuf>,
    },
    /// Largest characteristic-function gap on a lattice.
    Charfn {
        #[arg(num_args = 2)]
        inputs: Vec<PathBuf>,
    },
    /// Random-model moments against the analytic second moment.
    Moments,
    /// Mean square distance between log L and its Dirichlet polynomial.
    Secondmoment,
    /// Gaussian fit of the normalized coordinates.
    Clt {
        /// Measure CSV to fit instead of sampling the random model.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Fit exact Gaussian samples.
        #[arg(long)]
        synthetic: bool,
    },
    /// Sandwich and Fourier-support checks of the smoothing functions.
    BsCheck,
    /// Discrepancy over the configured heights.
    Sweep,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Discrepancy { .. } => "discrepancy",
            Command::Charfn { .. } => "charfn",
            Command::Moments => "moments",
            Command::Secondmoment => "secondmoment",
            Command::Clt { .. } => "clt",
            Command::BsCheck => "bs-check",
            Command::Sweep => "sweep",
        }
    }
}

fn dispatch(command: &Command, ctx: &Context) -> Result<Report, String> {
    match command {
        Command::Sample => commands::sample(ctx),
        Command::Discrepancy { inputs } => commands::discrepancy(ctx, inputs),
        Command::Charfn { inputs } => commands::charfn(ctx, inputs),
        Command::Moments => commands::moments(ctx),
        Command::Secondmoment => commands::secondmoment(ctx),
        Command::Clt { input, synthetic } => commands::clt(ctx, input.as_deref(), *synthetic),
        Command::BsCheck => commands::bs_check(ctx),
        Command::Sweep => commands::sweep(ctx),
    }
}

fn run(cli: Cli) -> Result<Vec<String>, String> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.run.seed = seed;
    }
    if let Some(format) = cli.format {
        config.format = format;
    }
    let out = cli.out.clone().or_else(|| config.out_dir.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out).map_err(|e| format!("{}: {e}", out.display()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0))
        .build()
        .map_err(|e| e.to_string())?;
    let workers = pool.current_num_threads();
    let format = config.format;
    let ctx = Context { hash: config.hash(), config, out };

    let start = Instant::now();
    let report = pool.install(|| dispatch(&cli.command, &ctx))?;
    let seconds = start.elapsed().as_secs_f64();

    let io = |e: std::io::Error| format!("{}: {e}", ctx.out.display());
    for path in report.write(&ctx.out, format, &ctx.hash, ctx.config.run.seed).map_err(io)? {
        println!("{}", path.display());
    }
    // the effective config, so the run can be repeated from the output alone
    let config_path = ctx.out.join(format!("{}.config.toml", cli.command.name()));
    std::fs::write(&config_path, ctx.config.to_toml()).map_err(io)?;
    report::write_timing(&ctx.out, cli.command.name(), seconds, workers).map_err(io)?;
    Ok(report.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("{} check(s) failed:", failures.len());
            for f in failures {
                eprintln!("  {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
