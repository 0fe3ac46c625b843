use std::process::ExitCode;

fn main() -> ExitCode {
    orlicz_lab::cli::main_with_args(std::env::args_os())
}
