//! `ulam`: bounds, scripted games, experiment sweeps, exhaustive
//! verification and gap tables.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "ulam", version, about = "Searching with lies and online algorithms with imperfect advice")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Competitive-ratio bounds for a problem at query budget (k, H).
    Bounds(BoundsArgs),
    /// Run one game session and dump the transcript.
    Play(PlayArgs),
    /// Run an experiment config and summarise the result rows.
    Simulate(SimulateArgs),
    /// Exhaustively check a questioner or adversary guarantee.
    Verify(VerifyArgs),
    /// Upper/lower bound gap at H = floor(tau k).
    Gaps(GapsArgs),
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// ts, ts_robust, bidding, bidding_robust, knapsack, fpb or augment.
    pub problem: String,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[arg(long = "H", default_value_t = 0)]
    pub h: u32,
    /// M/m for time series, U/L for knapsack.
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long, default_value_t = 0.75)]
    pub rho: f64,
    /// Robust bidding target.
    #[arg(long, default_value_t = 6.0)]
    pub r: f64,
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub phi: u32,
    /// Base of the parallel bid sequences.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Error-fraction slack for resource augmentation.
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    /// identify, find, continuous, min_cyclic or search.
    pub game: String,
    #[arg(long)]
    pub k: u32,
    #[arg(long = "H", default_value_t = 0)]
    pub h: u32,
    /// Domain size for identify/find.
    #[arg(long)]
    pub m: Option<u64>,
    /// Number of ranked items for min_cyclic/search.
    #[arg(long)]
    pub n: Option<u64>,
    /// Hidden value: an index, a rotation, or a rational "p/q" in (0, 1].
    #[arg(long)]
    pub x: Option<String>,
    /// none, fixed:[i,...], random:eta=E[,seed=S], greedy or minimax.
    #[arg(long, default_value = "none")]
    pub oracle: String,
    /// Cap on adaptive lies (defaults to H).
    #[arg(long)]
    pub lie_cap: Option<u32>,
    /// Questioner for the search game.
    #[arg(long, default_value = "comparison_weighting")]
    pub strategy: String,
    /// Seed for random lie positions and random strategies.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the number of random instances.
    #[arg(long)]
    pub instances: Option<usize>,
    /// Overrides the CSV output path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Overrides the JSONL output path.
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
    /// Print every result row instead of the per-budget summary.
    #[arg(long)]
    pub rows: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// identify, continuous, min_cyclic or search_adversary.
    pub scope: String,
    #[arg(long, default_value_t = 8)]
    pub max_k: u32,
    #[arg(long = "max-H", default_value_t = 2)]
    pub max_h: u32,
    #[arg(long, default_value_t = 64)]
    pub max_n: u64,
    #[arg(long, default_value_t = 20_000_000, allow_negative_numbers = true)]
    pub node_cap: i64,
    /// Single search case: number of items.
    #[arg(long)]
    pub n: Option<u64>,
    /// Single search case: queries.
    #[arg(long)]
    pub k: Option<u32>,
    /// Single search case: tolerance.
    #[arg(long = "H")]
    pub h: Option<u32>,
}

#[derive(Debug, Args)]
pub struct GapsArgs {
    /// ts, bidding or knapsack.
    pub problem: String,
    /// Comma-separated query counts.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub k: Vec<u32>,
    /// Comma-separated tolerance fractions in [0, 1/2].
    #[arg(long, value_delimiter = ',', default_value = "0.25")]
    pub tau: Vec<f64>,
    /// M/m for time series, U/L for knapsack.
    #[arg(long, default_value_t = 100.0)]
    pub ratio: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bounds(a) => commands::bounds(a),
        Command::Play(a) => commands::play(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Verify(a) => commands::verify(a),
        Command::Gaps(a) => commands::gaps(a),
    };
    let out = match result {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_usage() { 2 } else { 1 });
        }
    };
    if let Err(e) = output::emit(&out.output, cli.format) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return ExitCode::from(out.code);
        }
        eprintln!("error: writing output: {e}");
        return ExitCode::from(1);
    }
    for note in &out.warnings {
        eprintln!("warning: {note}");
    }
    ExitCode::from(out.code)
}
