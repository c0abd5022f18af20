//! Command-line surface.
//!
//! Flags that mirror a config-file key are `Option`s; resolution order is
//! flag > config file > built-in default, and the fully resolved values are
//! recorded in the run manifest.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "redus",
    version,
    about = "Adaptive-resampling training, threshold sweeps, and federated simulation",
    after_help = "Exit codes: 2 configuration error, 3 data error, 4 numeric failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Train one model, plain or with adaptive resampling
    Train(TrainArgs),
    /// Simulate federated training with FedAvg aggregation
    Fed(FedArgs),
    /// Train across a threshold grid and tabulate against the baseline
    Sweep(SweepArgs),
    /// Generate a synthetic CSV dataset
    Synth(SynthArgs),
    /// Merge run reports into a comparison table
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Vanilla,
    Redus,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// CSV dataset path (alternative to --synth)
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,

    /// Generate a synthetic dataset in memory instead of loading a file
    #[arg(long)]
    pub synth: bool,

    /// Synthetic rows [default: 2000]
    #[arg(long, value_name = "N")]
    pub synth_n: Option<usize>,

    /// Synthetic feature count [default: 10]
    #[arg(long, value_name = "D")]
    pub synth_d: Option<usize>,

    /// Synthetic class count [default: 3]
    #[arg(long, value_name = "C")]
    pub synth_classes: Option<usize>,

    /// Synthetic cluster separation [default: 6]
    #[arg(long, value_name = "SEP")]
    pub synth_separation: Option<f64>,

    /// Label column header name [default: label]
    #[arg(long, value_name = "NAME")]
    pub label_column: Option<String>,

    /// Treat the CSV as headerless; the label is the last column
    #[arg(long)]
    pub no_header: bool,

    /// Fraction of rows held out for evaluation [default: 0.2]
    #[arg(long, value_name = "FRAC")]
    pub test_fraction: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct TrainOpts {
    /// Exclusion threshold on sample weights [default: 0]
    #[arg(long, value_name = "THETA")]
    pub theta: Option<f64>,

    /// Training epochs [default: 10]
    #[arg(long, value_name = "E")]
    pub epochs: Option<u32>,

    /// Mini-batch size [default: 32]
    #[arg(long, value_name = "B")]
    pub batch_size: Option<usize>,

    /// Learning rate [default: 0.01]
    #[arg(long, value_name = "LR")]
    pub lr: Option<f64>,

    /// Master seed [default: 42]
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Training mode [default: redus]
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,

    /// Comma-separated hidden layer widths [default: 256,512,256,128]
    #[arg(long, value_name = "W,W,...")]
    pub layers: Option<String>,

    /// Dropout rate on hidden layers [default: 0.2]
    #[arg(long, value_name = "P")]
    pub dropout: Option<f64>,

    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Flat key=value config file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub train: TrainOpts,
}

#[derive(Args, Debug)]
pub struct FedArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub train: TrainOpts,

    /// Number of clients [default: 5]
    #[arg(long, value_name = "K")]
    pub clients: Option<usize>,

    /// Communication rounds [default: 50]
    #[arg(long, value_name = "R")]
    pub rounds: Option<u32>,

    /// Reset sample weights at the start of every round [default: true]
    #[arg(long, value_name = "BOOL")]
    pub reset_weights: Option<bool>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub train: TrainOpts,

    /// Grid size including the zero baseline [default: 10]
    #[arg(long, value_name = "STEPS")]
    pub steps: Option<usize>,

    /// Seeded repetitions per grid point [default: 5]
    #[arg(long, value_name = "REPS")]
    pub repeats: Option<u32>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Rows to generate
    #[arg(long, value_name = "N")]
    pub n: Option<usize>,

    /// Feature count
    #[arg(long, value_name = "D")]
    pub d: Option<usize>,

    /// Class count
    #[arg(long, value_name = "C")]
    pub classes: Option<usize>,

    /// Cluster separation
    #[arg(long, value_name = "SEP")]
    pub separation: Option<f64>,

    /// Master seed [default: 42]
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Output CSV path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Flat key=value config file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// One or more report.json files (e.g. sweep cells)
    #[arg(required = true, value_name = "FILE")]
    pub files: Vec<PathBuf>,

    /// Write a plot-ready CSV (threshold, accuracy, time) here
    #[arg(long, value_name = "FILE")]
    pub plot_out: Option<PathBuf>,
}
