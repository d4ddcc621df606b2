use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mte::cli::run(std::env::args()) as u8)
}
