use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cepgeo::run(std::env::args_os()) as u8)
}
