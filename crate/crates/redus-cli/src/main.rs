//! `redus`: adaptive-resampling training, threshold sweeps, and federated
//! simulation from the command line.

mod args;
mod commands;
mod config;
mod errors;
mod manifest;
mod output;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();

    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(a) => commands::train::run(a),
        Command::Fed(a) => commands::fed::run(a),
        Command::Sweep(a) => commands::sweep::run(a),
        Command::Synth(a) => commands::synth::run(a),
        Command::Report(a) => commands::report::run(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
