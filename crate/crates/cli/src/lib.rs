//! Front end of the `arithsemi` binary: flag and config-file resolution plus
//! the subcommand pipelines. Exposed as a library so tests can drive it
//! in-process.

pub mod commands;
pub mod config;
pub mod exit;

pub use commands::run;
pub use config::{parse_config, RunConfig};
pub use exit::CliError;

/// Parses `argv`, runs the command and returns the process exit code.
/// Diagnostics go to `stderr`.
pub fn main_with<I, T>(argv: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_config(argv).and_then(|cfg| run(&cfg, stdout));
    match result {
        Ok(()) => exit::EXIT_OK,
        Err(CliError::Clap(e)) => {
            let code = if e.use_stderr() { exit::EXIT_USAGE } else { exit::EXIT_OK };
            if code == exit::EXIT_OK {
                let _ = write!(stdout, "{e}");
            } else {
                let _ = write!(stderr, "{e}");
            }
            code
        }
        Err(err) => {
            let _ = writeln!(stderr, "arithsemi: {err}");
            err.exit_code()
        }
    }
}
