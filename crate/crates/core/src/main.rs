use std::process::ExitCode;

fn main() -> ExitCode {
    admm_paths::cli::main_with_args(std::env::args_os())
}
