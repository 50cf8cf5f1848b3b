//! Command-line front end: build an index, search, evaluate and compare runs.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_PARSE: u8 = 4;
pub const EXIT_VALIDATION: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }
}

impl From<semclust::Error> for CliError {
    fn from(e: semclust::Error) -> Self {
        use semclust::Error::*;
        let code = match &e {
            Io { .. } => EXIT_IO,
            Parse { .. } | Dimension { .. } | ZeroVector { .. } | Corrupt(_) => EXIT_PARSE,
            Duplicate { .. } | Validation(_) | Domain(_) | Lookup(_) | Incompatible { .. } | Config(_) => {
                EXIT_VALIDATION
            }
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "semclust", version, about = "Cluster-based semantic retrieval and evaluation")]
struct Cli {
    /// TOML file with RunConfig keys in kebab-case.
    #[arg(long, global = true, env = "SEMCLUST_CONFIG")]
    config: Option<PathBuf>,

    #[command(flatten)]
    run: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build and save an index from a corpus and word vectors.
    Index,
    /// Write a TREC run for every query.
    Search {
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Score a run against qrels.
    Evaluate {
        #[arg(long)]
        run: PathBuf,
        /// Precision and recall cutoffs.
        #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
        cutoffs: Vec<usize>,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Paired t-test between two runs on a per-query metric.
    Compare {
        #[arg(long)]
        run_a: PathBuf,
        #[arg(long)]
        run_b: PathBuf,
        /// ap, rprec, rr, p@k or r@k.
        #[arg(long, default_value = "ap")]
        metric: String,
    },
    /// Rewrite queries with lexicon synonyms.
    Reformulate {
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Summarize the clusters of a saved index.
    ClusterStats,
    /// Mean cosine distance over synonym pairs.
    EstimateEpsilon,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?.overlaid(&cli.run),
        None => cli.run,
    };
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Index => commands::index(&config, &mut out),
        Command::Search { output } => commands::search(&config, &output, &mut out),
        Command::Evaluate { run, cutoffs, json } => commands::evaluate(&config, &run, &cutoffs, json.as_deref(), &mut out),
        Command::Compare { run_a, run_b, metric } => commands::compare(&config, &run_a, &run_b, &metric, &mut out),
        Command::Reformulate { output } => commands::reformulate(&config, &output, &mut out),
        Command::ClusterStats => commands::cluster_stats(&config, &mut out),
        Command::EstimateEpsilon => commands::estimate_epsilon(&config, &mut out),
    }
}
