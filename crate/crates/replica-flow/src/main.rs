use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(replica_flow::cli::main_with(std::env::args_os()))
}
