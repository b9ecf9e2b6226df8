use std::process::ExitCode;

use clap::Parser;
use polarnet_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match polarnet_cli::run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
