use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (status, out) = nnrank::run(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    ExitCode::from(status as u8)
}
