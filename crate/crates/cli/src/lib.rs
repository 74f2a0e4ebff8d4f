//! Library half of the `ctx` binary: argument definitions, command
//! implementations and report schemas.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use crate::args::Cli;
use crate::error::EXIT_USAGE;

/// Parses `argv`, runs the command and writes its output. Returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match commands::dispatch(&cli) {
        Ok(output) => {
            if stdout.write_all(output.as_bytes()).is_err() {
                return error::EXIT_CANTCREAT;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "ctx: {e}");
            e.code
        }
    }
}
