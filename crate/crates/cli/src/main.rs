mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{RawConfig, Settings};
use error::CliResult;

/// Two-sided re-ranking experiments: split, score, re-rank, evaluate.
#[derive(Parser)]
#[command(name = "stable-rerank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Split the dataset into train, validation and test and write split.csv.
    Split,
    /// Score unseen user-item pairs from the training split and write scores.csv.
    Score,
    /// Run every configured re-ranker and write one matching file each.
    Rerank,
    /// Evaluate the written matchings and write report.csv and report.json.
    Evaluate,
    /// Run the deferred-acceptance re-ranker over a list of caps and write sweep.csv.
    Sweep,
    /// Record utilities during a deferred-acceptance run and write trace.csv.
    Trace,
}

/// Every flag except --config overrides the config key of the same name.
#[derive(Args)]
struct Flags {
    /// Config file with `key = value` lines and optional [section] headers.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Ratings file.
    #[arg(long, global = true, value_name = "PATH")]
    dataset: Option<String>,
    /// Ratings file layout: movielens-dat or csv.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Train, validation and test fractions, e.g. 0.8,0.1,0.1.
    #[arg(long, global = true)]
    ratios: Option<String>,
    /// Split seed.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<String>,
    /// Scorer: knn or external.
    #[arg(long, global = true)]
    scorer: Option<String>,
    /// kNN neighbourhood size.
    #[arg(long, global = true, value_name = "INT")]
    neighbors: Option<String>,
    /// Minimum co-rated items for a kNN similarity.
    #[arg(long = "min-overlap", global = true, value_name = "INT")]
    min_overlap: Option<String>,
    /// External `user,item,score` file for the external scorer.
    #[arg(long, global = true, value_name = "PATH")]
    scores: Option<String>,
    /// Recommendation list length.
    #[arg(long, global = true, value_name = "INT")]
    k: Option<String>,
    /// Re-rankers, e.g. "identity, br(0.01), mmda(20)".
    #[arg(long, global = true)]
    rerankers: Option<String>,
    /// Item cap: an integer, lower-bound, or a per-item `item,cap` file.
    #[arg(long, global = true, value_name = "INT|lower-bound")]
    cap: Option<String>,
    /// Popularity penalty exponent for br.
    #[arg(long, global = true, value_name = "REAL")]
    alpha: Option<String>,
    /// How unscored candidates enter the rankings: append-unscored or scored-only.
    #[arg(long, global = true)]
    completion: Option<String>,
    /// When a user runs out of preferences: fail, or fill from remaining capacity.
    #[arg(long = "on-exhaustion", global = true)]
    on_exhaustion: Option<String>,
    /// Caps for sweep, e.g. 12,15,20,50.
    #[arg(long, global = true)]
    caps: Option<String>,
    /// Proposals between trace snapshots.
    #[arg(long, global = true, value_name = "INT")]
    interval: Option<String>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<String>,
}

impl Flags {
    fn settings(self) -> CliResult<Settings> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::load(path)?,
            None => RawConfig::default(),
        };
        let pairs = [
            ("dataset", self.dataset),
            ("format", self.format),
            ("ratios", self.ratios),
            ("seed", self.seed),
            ("scorer", self.scorer),
            ("neighbors", self.neighbors),
            ("min-overlap", self.min_overlap),
            ("scores", self.scores),
            ("k", self.k),
            ("rerankers", self.rerankers),
            ("cap", self.cap),
            ("alpha", self.alpha),
            ("completion", self.completion),
            ("on-exhaustion", self.on_exhaustion),
            ("caps", self.caps),
            ("interval", self.interval),
            ("out", self.out),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                raw.set_flag(key, v);
            }
        }
        Settings::resolve(&raw)
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let settings = cli.flags.settings()?;
    match cli.command {
        Command::Split => commands::split(&settings),
        Command::Score => commands::score(&settings),
        Command::Rerank => commands::rerank(&settings),
        Command::Evaluate => commands::evaluate_cmd(&settings),
        Command::Sweep => commands::sweep(&settings),
        Command::Trace => commands::trace(&settings),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_error = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage_error { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
