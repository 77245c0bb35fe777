use std::process::ExitCode;

use clap::Parser;
use nonoverlap_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.resolve().and_then(|c| run(&c)) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.payload_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
