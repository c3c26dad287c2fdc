//! Command-line front end for `cred_core`: streaming JSONL scoring and
//! filtering, group aggregation, benchmark evaluation, grid search and Zipf
//! curve utilities.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

pub mod bread;
pub mod commands;
pub mod config;
pub mod error;
pub mod stream;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::bench::{EvalCmd, TuneCmd};
use commands::docs::{AggregateCmd, FilterCmd, ScoreCmd};
use commands::zipf::{FitZipfCmd, ZipfCmd};
pub use error::{exit_code, CliError};

#[derive(Debug, Parser)]
#[command(name = "cred", version, about = "Character-redundancy scores for web text")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add a `cred` score object to every JSONL record.
    Score(ScoreCmd),
    /// Keep only records the classifier calls clean.
    Filter(FilterCmd),
    /// Test-split F1/P4 report for one classifier.
    Eval(EvalCmd),
    /// Constrained grid search with frozen-threshold test scores.
    Tune(TuneCmd),
    /// Per-group mean scores as TSV.
    Aggregate(AggregateCmd),
    /// Fit the reference curve constants to empirical frequencies.
    FitZipf(FitZipfCmd),
    /// Print the reference Zipf curve for one ngram length.
    Zipf(ZipfCmd),
    /// List the shipped classifier signatures.
    Defaults {
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Score(c) => commands::docs::score(c),
        Command::Filter(c) => commands::docs::filter(c),
        Command::Eval(c) => commands::bench::eval(c),
        Command::Tune(c) => commands::bench::tune(c),
        Command::Aggregate(c) => commands::docs::aggregate(c),
        Command::FitZipf(c) => commands::zipf::fit_zipf(c),
        Command::Zipf(c) => commands::zipf::zipf(c),
        Command::Defaults { output } => commands::zipf::defaults(output),
    }
}
