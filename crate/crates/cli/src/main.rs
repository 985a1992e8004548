mod args;
mod commands;

use std::ffi::OsString;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::Parser;

/// Parses `argv` and runs the subcommand; returns the process exit status.
fn cli_main<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                eprint!("{}", e.render().ansi());
                return 2;
            }
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    match commands::run(cli.command, stdin, stdout) {
        Ok(()) => 0,
        Err(commands::CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(commands::CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn main() -> ExitCode {
    let code = cli_main(std::env::args_os(), &mut io::stdin().lock(), &mut io::stdout().lock());
    ExitCode::from(code)
}
