use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(sdchoice::cli::run(std::env::args_os()))
}
