use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    lnmodal_cli::main_with(lnmodal_cli::Cli::parse())
}
