use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(minipgas::cli::run_cli(std::env::args_os()))
}
