mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cohesion_core::stats::BrownForsytheVariant;

#[derive(Parser)]
#[command(name = "cohesion", version, about = "Unitize interactions, collect ratings and analyze them")]
struct Cli {
    /// TOML file with defaults for any subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for simulated raters and service randomization.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for outputs whose path is not given explicitly.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut annotated timelines into coding units.
    Unitize(UnitizeArgs),
    /// Package timelines, units, questionnaire and honey pots into a study bundle.
    Bundle(BundleArgs),
    /// Run the rating-collection service.
    Serve(ServeArgs),
    /// Draw synthetic ratings and expert scores for a set of units.
    SimulateRaters(SimulateArgs),
    /// Write validity-filtered ratings and matrices from a service event log.
    Export(ExportArgs),
    /// Run reliability, variance, information-loss and ranking analyses.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TechniqueArg {
    Est,
    Act,
    Aut,
}

#[derive(Clone, Copy, ValueEnum)]
enum TailArg {
    Drop,
    Keep,
    Merge,
}

#[derive(Args)]
struct UnitizeArgs {
    #[arg(long, value_enum)]
    technique: TechniqueArg,
    /// Window length in seconds (aut only).
    #[arg(long)]
    window: Option<f64>,
    /// Handling of the final partial window (aut only).
    #[arg(long, value_enum)]
    tail: Option<TailArg>,
    /// Turn length cap in seconds (act only).
    #[arg(long)]
    max_turn: Option<f64>,
    /// Timeline files, or directories whose *.json files are read.
    #[arg(long = "in", num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    /// Units file; defaults to <out-dir>/units.csv, else standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BundleArgs {
    #[arg(long, num_args = 1.., required = true)]
    timelines: Vec<PathBuf>,
    #[arg(long, num_args = 1.., required = true)]
    units: Vec<PathBuf>,
    /// Questionnaire JSON; the built-in ten items when omitted.
    #[arg(long)]
    questionnaire: Option<PathBuf>,
    /// Honey-pot JSON list; built-in checks when omitted.
    #[arg(long)]
    honey_pots: Option<PathBuf>,
    #[arg(long)]
    expert: Option<PathBuf>,
    /// Plain-text instructions shown to raters.
    #[arg(long)]
    instructions: Option<PathBuf>,
    /// Bundle directory; defaults to <out-dir>/bundle.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    bundle: Option<PathBuf>,
    /// Event log path.
    #[arg(long)]
    store: Option<PathBuf>,
    #[arg(long)]
    bind: Option<String>,
    /// Ratings invalidated by a failed honey pot: block, rater or unit.
    #[arg(long)]
    discard_scope: Option<String>,
    /// Serve least-served units first.
    #[arg(long)]
    balanced: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, num_args = 1.., required = true)]
    units: Vec<PathBuf>,
    #[arg(long)]
    questionnaire: Option<PathBuf>,
    #[arg(long)]
    raters: Option<usize>,
    #[arg(long)]
    noise_sd: Option<f64>,
    #[arg(long)]
    unit_sd: Option<f64>,
    #[arg(long)]
    coverage: Option<f64>,
    /// Ratings file; defaults to <out-dir>/ratings.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Expert scores file; defaults to <out-dir>/expert.csv.
    #[arg(long)]
    expert_out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    discard_scope: Option<String>,
    /// Defaults to <out-dir>/ratings.csv.
    #[arg(long)]
    ratings_out: Option<PathBuf>,
    /// Defaults to <out-dir>/matrices.json.
    #[arg(long)]
    matrices_out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, num_args = 1.., required = true)]
    units: Vec<PathBuf>,
    #[arg(long)]
    ratings: PathBuf,
    #[arg(long)]
    expert: Option<PathBuf>,
    #[arg(long)]
    questionnaire: Option<PathBuf>,
    /// Brown-Forsythe statistic.
    #[arg(long)]
    variant: Option<BrownForsytheVariant>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Decimal places in report.txt.
    #[arg(long)]
    decimals: Option<u32>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
