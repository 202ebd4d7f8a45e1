use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let inv = cbs_cli::run_cli(std::env::args_os(), &mut std::io::stdin());
    let _ = std::io::stdout().write_all(inv.stdout.as_bytes());
    let _ = std::io::stderr().write_all(inv.stderr.as_bytes());
    ExitCode::from(inv.code as u8)
}
