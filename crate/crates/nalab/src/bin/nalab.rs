use std::process::ExitCode;

fn main() -> ExitCode {
    let code = nalab::cli::main_with(std::env::args());
    ExitCode::from(code as u8)
}
