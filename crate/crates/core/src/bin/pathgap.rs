use std::process::ExitCode;

fn main() -> ExitCode {
    pathgap::cli::main_with_args(std::env::args_os())
}
