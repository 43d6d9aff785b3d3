//! `dhss` command-line front end.
//!
//! Exit status: 0 success, 1 parse or parameter error, 2 unauthorized
//! quorum, 3 perfectness sweep refused by its size guard, 4 perfectness
//! sweep found a counterexample.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "dhss", version, about = "Disjunctive hierarchical secret sharing toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Deal shares and write the bulletin plus one file per participant.
    Deal(DealArgs),
    /// Reconstruct the secret from a bulletin and share files.
    Combine(CombineArgs),
    /// Pretty-print a bulletin.
    Inspect(InspectArgs),
    /// Reproduce the linear-algebra attack on the GPN scheme.
    GpnDemo(GpnArgs),
    /// Exhaustively check that unauthorized views admit every secret.
    PerfectnessCheck(PerfectnessArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Determinism {
    /// Seed the randomness source (requires --insecure-deterministic).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Allow --seed. Deterministic output is for testing only.
    #[arg(long)]
    pub insecure_deterministic: bool,
}

#[derive(Args, Debug)]
pub struct DealArgs {
    /// Prime modulus, decimal or 0x-prefixed hex.
    #[arg(long)]
    pub modulus: String,
    /// Level sizes n_1,...,n_m.
    #[arg(long, value_delimiter = ',', required = true)]
    pub levels: Vec<usize>,
    /// Thresholds t_1,...,t_m.
    #[arg(long, value_delimiter = ',', required = true)]
    pub thresholds: Vec<usize>,
    /// Secret as hex; drawn uniformly (and printed) when omitted.
    #[arg(long)]
    pub secret: Option<String>,
    /// Draw the alphas uniformly instead of alpha_l = l.
    #[arg(long)]
    pub random_alphas: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub determinism: Determinism,
}

#[derive(Args, Debug)]
pub struct CombineArgs {
    #[arg(long)]
    pub bulletin: PathBuf,
    #[arg(long = "share", required = true)]
    pub shares: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    #[arg(long)]
    pub bulletin: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GpnCase {
    Example1,
    Example2,
    Custom,
}

#[derive(Args, Debug)]
pub struct GpnArgs {
    #[arg(value_enum)]
    pub case: GpnCase,
    /// Custom only: prime modulus.
    #[arg(long)]
    pub modulus: Option<String>,
    /// Custom only: public abscissae x_1,...,x_n.
    #[arg(long, value_delimiter = ',')]
    pub abscissae: Vec<u64>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub t1: Option<usize>,
    #[arg(long)]
    pub t2: Option<usize>,
    /// Custom only: coalition participant indices.
    #[arg(long, value_delimiter = ',')]
    pub coalition: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct PerfectnessArgs {
    #[arg(long)]
    pub modulus: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub levels: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub thresholds: Vec<usize>,
    /// Emit the report as JSON.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub determinism: Determinism,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
