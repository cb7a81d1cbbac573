use clap::Parser;
use std::process::ExitCode;
use superpluecker_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            println!("{}", report.to_json());
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("superpluecker: {e}");
            ExitCode::from(2)
        }
    }
}
