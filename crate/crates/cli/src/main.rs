//! `qpp`: construct, verify and exercise permutation-polynomial
//! interleavers.
//!
//! Exit status is 0 for success or an affirmative verdict, 1 for a
//! negative verdict (not a permutation, not contention-free, ...) and 2
//! for usage or input errors.

mod commands;
mod config;
mod output;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "qpp", version, about = "Permutation-polynomial interleavers and turbo codec toolkit")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for every randomized step [default: 1, or the `fer` config seed].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl GlobalArgs {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }
}

/// Interleaver source tokens: `qpp N f1 f2`, `poly N c1 c2 ...`,
/// `identity N`, `srandom N S SEED`, `file PATH` or a bare path.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SourceArgs {
    #[arg(required = true, num_args = 1.., value_name = "SOURCE")]
    pub source: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether f1 x + f2 x^2 permutes Z_N.
    Check(commands::CheckArgs),
    /// Count quadratic permutation polynomials (f1, f2) over Z_N.
    Count(commands::CountArgs),
    /// List quadratic permutation polynomials over Z_N.
    Enumerate(commands::EnumerateArgs),
    /// Write the explicit permutation of a source as an interleaver file.
    Materialize(SourceArgs),
    /// Inverse permutation polynomial of a quadratic permutation polynomial.
    Invert(commands::InvertArgs),
    /// Coefficients of outer(inner(x)) mod N.
    Compose(commands::ComposeArgs),
    /// Contention-free check for every window size dividing N.
    Mcf(SourceArgs),
    /// Spread factor and its ratio to sqrt(2N).
    Spread(commands::SpreadArgs),
    /// Generate an S-random interleaver.
    Srandom(commands::SrandomArgs),
    /// Monte-Carlo frame error rate sweep driven by a config file.
    Fer(commands::FerArgs),
    /// Upper bound on dmin from all low-weight inputs.
    DminBound(commands::DminArgs),
    /// Bank access traces of the windowed parallel decoder.
    Partrace(commands::PartraceArgs),
}

fn run(cli: Cli) -> anyhow::Result<commands::Verdict> {
    if let Some(threads) = cli.global.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Check(a) => commands::check(g, a),
        Command::Count(a) => commands::count(g, a),
        Command::Enumerate(a) => commands::enumerate(g, a),
        Command::Materialize(a) => commands::materialize(g, a),
        Command::Invert(a) => commands::invert(g, a),
        Command::Compose(a) => commands::compose(g, a),
        Command::Mcf(a) => commands::mcf(g, a),
        Command::Spread(a) => commands::spread(g, a),
        Command::Srandom(a) => commands::srandom(g, a),
        Command::Fer(a) => commands::fer(g, a),
        Command::DminBound(a) => commands::dmin_bound(g, a),
        Command::Partrace(a) => commands::partrace(g, a),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(commands::Verdict::Yes) => ExitCode::SUCCESS,
        Ok(commands::Verdict::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
