use std::io::Write;
use std::process::ExitCode;

use rrtcut::config::SEED_ENV;
use rrtcut::{execute, parse_args, CliError};

fn main() -> ExitCode {
    let spec = match parse_args(std::env::args_os(), std::env::var(SEED_ENV).ok()) {
        Ok(spec) => spec,
        Err(CliError::Clap(e)) => e.exit(),
        Err(e) => {
            eprintln!("rrtcut: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(&spec) {
        Ok(text) => {
            if spec.output_path.is_none() {
                let mut out = std::io::stdout().lock();
                if out.write_all(text.as_bytes()).is_err() {
                    return ExitCode::from(4);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rrtcut: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
