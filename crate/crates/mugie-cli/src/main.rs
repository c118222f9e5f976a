//! `mugie` — robustness testing for an intermediate verification language.
//!
//! Subcommands:
//!
//! * `mutate`   — generate semantics-preserving mutants of one seed;
//! * `check`    — run a verifier on a directory of seed + mutants;
//! * `report`   — compute robustness measures from results files;
//! * `campaign` — the full pipeline over many seeds, tools, and batches.
//!
//! Exit codes: 0 success, 1 nothing to do, 2 malformed input, 3 I/O
//! failure, 4 tool launch failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mugie::metrics::ReportFormat;

mod commands;
mod config;

#[derive(Parser)]
#[command(name = "mugie", version, about = "Robustness testing for IVL verifiers via semantics-preserving mutation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate mutants of a seed program into an output directory.
    Mutate(MutateArgs),
    /// Run a verifier on the seed and mutants in a directory.
    Check(CheckArgs),
    /// Summarize results files into the robustness report.
    Report(ReportArgs),
    /// Run the full generate-check-report pipeline from a config file.
    Campaign(CampaignArgs),
}

#[derive(Args)]
pub struct MutateArgs {
    /// Seed program (.bpl).
    #[arg(long)]
    pub seed: PathBuf,
    /// Output directory for mutant files.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of mutants to generate (default: 100, or 50 with --only).
    #[arg(long)]
    pub num: Option<usize>,
    /// Generator seed; identical seeds reproduce identical mutants.
    #[arg(long, default_value_t = 42)]
    pub rng_seed: u64,
    /// Restrict generation to a single operator (S1, S5, S6, L1, L2, L4,
    /// L5, L6, L8, G1, G2).
    #[arg(long)]
    pub only: Option<String>,
    /// Comma-separated operator weights, e.g. S1=1,L4=2.5 (unlisted
    /// operators get weight 0).
    #[arg(long)]
    pub weights: Option<String>,
    /// Bound on generation attempts (default: 10x the mutant count).
    #[arg(long)]
    pub max_attempts: Option<u64>,
    /// Permit the trigger-removing operator G2 (not semantics-preserving).
    #[arg(long)]
    pub allow_trigger_mutation: bool,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Directory holding the seed copy and mutant files.
    #[arg(long)]
    pub dir: PathBuf,
    /// Tool command template; the token {files} expands to the input paths.
    #[arg(long)]
    pub tool: String,
    /// Tool name recorded in result rows (default: the command's basename).
    #[arg(long)]
    pub tool_name: Option<String>,
    /// Per-run timeout in seconds.
    #[arg(long, default_value_t = 20.0)]
    pub timeout: f64,
    /// Timeout confirmation runs: a timeout counts only if all of them
    /// time out.
    #[arg(long, default_value_t = 10)]
    pub confirm: u32,
    /// Results file (default: `<dir>/results.ndjson`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Concurrent verification runs.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Override the success-classification regex.
    #[arg(long)]
    pub success_pattern: Option<String>,
    /// Override the failure-classification regex.
    #[arg(long)]
    pub failure_pattern: Option<String>,
}

#[derive(Args)]
pub struct ReportArgs {
    /// Results files (newline-delimited JSON); the batch label is the file
    /// stem minus any `results.` prefix.
    #[arg(required = true)]
    pub results: Vec<PathBuf>,
    /// Output format.
    #[arg(long, default_value = "text", value_parser = parse_format)]
    pub format: ReportFormat,
    /// Seed-to-group map file (`<seed> <group>` per line).
    #[arg(long)]
    pub group_map: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse()
}

#[derive(Args)]
pub struct CampaignArgs {
    /// Campaign configuration file (TOML).
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    NothingToDo(String),
    Malformed(String),
    Io(String),
    Launch(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::NothingToDo(_) => 1,
            CliError::Malformed(_) => 2,
            CliError::Io(_) => 3,
            CliError::Launch(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::NothingToDo(m)
            | CliError::Malformed(m)
            | CliError::Io(m)
            | CliError::Launch(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Mutate(args) => commands::cmd_mutate(args),
        Command::Check(args) => commands::cmd_check(args),
        Command::Report(args) => commands::cmd_report(args),
        Command::Campaign(args) => commands::cmd_campaign(&args.config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("mugie: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
