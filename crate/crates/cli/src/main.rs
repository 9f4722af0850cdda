//! Command line front end: model file ingestion, command dispatch, and
//! deterministic machine-readable output.
//!
//! Exit codes: 0 success, 2 usage error, 3 model/argument validation error,
//! 4 capacity (size cap) error.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bcregion_core::Error;

mod commands;
mod model;
mod render;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Parser)]
#[command(
    name = "bcregion",
    about = "Achievable rate regions of K-receiver broadcast channels",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArg {
    /// Path to a model JSON file.
    #[arg(long)]
    model: String,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Print the ordered block decomposition of the subsets meeting T and
    /// verify its identities.
    Decompose {
        /// Receiver count K.
        #[arg(long)]
        k: usize,
        /// Receiver set T as a comma-separated list, e.g. 1,2,3.
        #[arg(long)]
        t: String,
        /// Ordering of T as a comma-separated list, e.g. 2,1,3.
        #[arg(long)]
        pi: String,
    },
    /// Parse and validate a model file.
    Validate {
        #[arg(long)]
        model: String,
        /// Re-emit the model as canonical JSON on stdout.
        #[arg(long)]
        normalize: bool,
    },
    /// Generate the closed-form rate system of a model.
    Region(ModelArg),
    /// Generate the explicit three-receiver system (K = 3 only).
    Corollary3(ModelArg),
    /// Maximize a weighted rate sum over the closed-form region.
    Support {
        #[command(flatten)]
        model: ModelArg,
        /// Comma-separated per-receiver weights, e.g. 1,1,1.
        #[arg(long)]
        weights: String,
    },
    /// Maximize a weighted rate sum over the pre-elimination split-rate
    /// system (covering + packing constraints).
    Project {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        weights: String,
    },
    /// Compare two models' closed-form regions over random directions.
    Compare {
        #[arg(long)]
        model_a: String,
        #[arg(long)]
        model_b: String,
        #[arg(long)]
        dirs: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Search the auxiliary pmf by seeded random-restart coordinate ascent.
    Optimize {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        weights: String,
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Estimate the covering failure probability by Monte Carlo.
    SimulateCover {
        #[command(flatten)]
        model: ModelArg,
        /// Blocklength in symbols.
        #[arg(long)]
        n: usize,
        /// Per-subset index excesses, e.g. 12=0.21,13=0.21 (bits/symbol).
        #[arg(long, default_value = "")]
        rates: String,
        /// Per-level typicality slacks, strictly decreasing, e.g.
        /// 0.85,0.70,0.50.
        #[arg(long)]
        eps: String,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Argument(_) | Error::Validation(_) => 3,
        Error::Capacity(_) => 4,
        Error::Generation(_) | Error::Internal(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        // Bad subset or ordering syntax is a usage error for decompose.
        Command::Decompose { k, t, pi } => match commands::decompose(k, &t, &pi) {
            Err(Error::Argument(msg)) => {
                eprintln!("error: invalid argument: {msg}");
                return ExitCode::from(2);
            }
            other => other,
        },
        Command::Validate { model, normalize } => commands::validate(&model, normalize),
        Command::Region(m) => commands::region(&m.model, m.format),
        Command::Corollary3(m) => commands::corollary3(&m.model, m.format),
        Command::Support { model, weights } => {
            commands::support(&model.model, &weights, model.format)
        }
        Command::Project { model, weights } => {
            commands::project(&model.model, &weights, model.format)
        }
        Command::Compare {
            model_a,
            model_b,
            dirs,
            seed,
            format,
        } => commands::compare(&model_a, &model_b, dirs, seed, format),
        Command::Optimize {
            model,
            weights,
            budget,
            seed,
        } => commands::optimize(&model.model, &weights, budget, seed, model.format),
        Command::SimulateCover {
            model,
            n,
            rates,
            eps,
            trials,
            seed,
        } => commands::simulate_cover(&model.model, n, &rates, &eps, trials, seed, model.format),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
