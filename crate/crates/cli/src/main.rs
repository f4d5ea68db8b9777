use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = dqf_cli::Cli::parse();
    match dqf_cli::run(cli) {
        Ok(msg) => {
            print!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
