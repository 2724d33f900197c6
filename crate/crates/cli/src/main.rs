use std::process::ExitCode;

use enaqt_cli::{main_with_args, CliError};

fn main() -> ExitCode {
    match main_with_args(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("enaqt: error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
