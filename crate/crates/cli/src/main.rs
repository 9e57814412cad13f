use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ihc_cli::run(std::env::args()) as u8)
}
