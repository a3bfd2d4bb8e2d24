use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let threads = std::env::var("NOVARCH_THREADS").ok();
    let out = novarch_cli::run(std::env::args_os(), &mut std::io::stdin(), threads.as_deref());
    // Write failures (a closed pipe) do not change the outcome.
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
