//! Thin binary entry point: parse arguments, run the selected
//! subcommand, and map failures onto the documented exit codes.

use clap::Parser;

fn main() {
    let cli = turbosim::cli::Cli::parse();
    if let Err(err) = turbosim::cli::run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
