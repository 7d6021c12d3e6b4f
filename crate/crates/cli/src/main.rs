use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = anl_cli::Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let status = match anl_cli::run(&cli, &mut out) {
        Ok(status) => status,
        Err(anl_cli::CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => anl_cli::Status::Ok,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            anl_cli::Status::Usage
        }
    };
    let _ = out.flush();
    ExitCode::from(status as u8)
}
