use std::process::ExitCode;

use clap::Parser;

use chialvo::cli::{self, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = cli::run(args, &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code as u8)
}
