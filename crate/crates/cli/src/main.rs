mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILS: u8 = 2;
    pub const INCONCLUSIVE: u8 = 3;
    pub const USAGE: u8 = 64;
    pub const BUDGET: u8 = 65;
}

pub const PRECISION_CAP_ENV: &str = "EXPANDERLAB_PRECISION_CAP";

#[derive(Debug, Parser)]
#[command(name = "expanderlab", version, about = "Exact checks and extremal search for |A(A+1)|")]
pub struct Cli {
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check registry relations on set files or seeded random instances.
    Verify(VerifyArgs),
    /// Run the prime-field or real pipeline on one set.
    Pipeline(PipelineArgs),
    /// Search for sets with small |A(A+1)|.
    Search(SearchArgs),
    /// Dump the multiplicity histogram and energies of a set pair.
    Energy(EnergyArgs),
    /// Re-run the command recorded in a manifest and compare outputs.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Set files. Each holds one set, or an array `[A, B, C]`.
    pub files: Vec<PathBuf>,
    /// Relation keys (R1..R14); repeatable or comma-separated.
    #[arg(long = "relation", value_delimiter = ',')]
    pub relations: Vec<String>,
    #[arg(long, conflicts_with = "relations")]
    pub all: bool,
    /// `ε` for R8, as a fraction.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Richness threshold for R7 and R9.
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long)]
    pub precision_cap: Option<u32>,
    /// Generate this many random instances.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Prime for random instances.
    #[arg(long)]
    pub p: Option<u64>,
    /// Integer range `LO:HI` for random rational instances.
    #[arg(long, allow_hyphen_values = true)]
    pub rational_range: Option<String>,
    /// Largest random set size.
    #[arg(long, default_value_t = 8)]
    pub max_size: usize,
    /// Output file for JSON lines; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    pub file: PathBuf,
    /// `fp` or `real`.
    #[arg(long)]
    pub mode: String,
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub precision_cap: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, conflicts_with = "rational_range")]
    pub p: Option<u64>,
    /// Integer range `LO:HI` over Q.
    #[arg(long, allow_hyphen_values = true)]
    pub rational_range: Option<String>,
    /// Set sizes; repeatable or comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// exhaustive, hillclimb or anneal.
    #[arg(long, default_value = "exhaustive")]
    pub mode: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = expanderlab::search::DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = expanderlab::search::DEFAULT_ITERATIONS)]
    pub iterations: u64,
    #[arg(long, default_value_t = expanderlab::search::DEFAULT_RESTARTS)]
    pub restarts: u32,
    /// Admit 0 and -1 into candidate sets.
    #[arg(long)]
    pub admit_degenerate: bool,
    /// Skip the `|A|² < p` guard.
    #[arg(long)]
    pub no_density_guard: bool,
    /// `csv` or `json`.
    #[arg(long, default_value = "csv")]
    pub format: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    pub a: PathBuf,
    /// Defaults to `A`.
    pub b: Option<PathBuf>,
    /// product, ratio or additive-shift.
    #[arg(long, default_value = "product")]
    pub kind: String,
    /// Exponents `α ≥ 1`; repeatable or comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = ["2".to_string()])]
    pub alpha: Vec<String>,
    #[arg(long)]
    pub precision_cap: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(exit::USAGE);
        }
    }
    manifest::set_recorded_args(&argv[1..]);
    ExitCode::from(commands::dispatch(cli.command))
}
