//! `confex`: train vocabularies, scan instances into configuration records,
//! analyze a record corpus for misconfigurations, and generate synthetic corpora.

mod analyze;
mod config;
mod discover;
mod generate;
mod output;
mod report;
mod scan;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::output::{Outcome, UsageError};

#[derive(Debug, Parser)]
#[command(
    name = "confex",
    version,
    about = "Configuration discovery, extraction and misconfiguration analysis"
)]
struct Cli {
    /// Settings file (TOML). Defaults to `$CONFEX_HOME/config.toml` when present.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for per-instance and per-file parallelism.
    #[arg(long, short = 'j', global = true)]
    jobs: Option<usize>,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// More logging; repeat for debug output.
    #[arg(long, short = 'v', global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build or extend an application's keyword vocabulary from labeled files.
    Train(train::TrainArgs),
    /// Label the files of one or more roots without extracting records.
    Discover(discover::DiscoverArgs),
    /// Extract configuration records from instance snapshots.
    Scan(scan::ScanArgs),
    /// Rank suspicious values and report type/rule violations.
    Analyze(analyze::AnalyzeArgs),
    /// Write a deterministic synthetic corpus with ground truth.
    Generate(generate::GenerateArgs),
    /// Render analysis reports as text.
    Report(report::ReportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(3),
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let settings = config::Settings::load(cli.config.as_deref())?.with_execution(cli.jobs, cli.sequential);
    settings.install_pool()?;
    match cli.command {
        Command::Train(args) => train::run(args, &settings),
        Command::Discover(args) => discover::run(args, &settings),
        Command::Scan(args) => scan::run(args, &settings),
        Command::Analyze(args) => analyze::run(args, &settings),
        Command::Generate(args) => generate::run(args, &settings),
        Command::Report(args) => report::run(args),
    }
}
