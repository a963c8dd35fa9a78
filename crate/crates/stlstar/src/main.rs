use std::process::ExitCode;

fn main() -> ExitCode {
    stlstar::cli::run()
}
