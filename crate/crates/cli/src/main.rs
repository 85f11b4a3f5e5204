use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(nilperc_cli::run(std::env::args_os()))
}
