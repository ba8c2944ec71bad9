mod commands;
mod output;
mod sweep;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use itermap::groups::DEFAULT_BIT_BUDGET;

use commands::{AnalyzeArgs, BoundsArgs, CompareArgs, FamilyArgs, IndicatrixArgs};
use output::Failure;
use sweep::SweepArgs;

/// Image sizes of iterated rational maps over prime fields, and their
/// predictions from iterated wreath products.
#[derive(Debug, Parser)]
#[command(name = "itermap", version)]
struct Cli {
    /// Cap on the bit size of exact coefficients before switching to intervals.
    #[arg(long, global = true, env = "ITERMAP_BIT_BUDGET", default_value_t = DEFAULT_BIT_BUDGET)]
    bit_budget: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Functional-graph statistics of one map over one prime.
    Analyze(AnalyzeArgs),
    /// Fixed-point indicatrix of a group or coset and its FPP table.
    Indicatrix(IndicatrixArgs),
    /// Check the FPP bounds of a family, and optionally a comparison lemma.
    Bounds(BoundsArgs),
    /// Image densities of a map against a group hypothesis.
    Compare(CompareArgs),
    /// Run `compare` for one coefficient template over a range of primes.
    Sweep(SweepArgs),
    /// Height constants and prime thresholds of an integer polynomial.
    Family(FamilyArgs),
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Compute(e.to_string()))?;
    }
    let budget = cli.bit_budget;
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Indicatrix(a) => commands::indicatrix_cmd(a, budget),
        Command::Bounds(a) => commands::bounds(a, budget),
        Command::Compare(a) => commands::compare_cmd(a, budget),
        Command::Sweep(a) => sweep::sweep(a, budget),
        Command::Family(a) => commands::family_cmd(a, budget),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
