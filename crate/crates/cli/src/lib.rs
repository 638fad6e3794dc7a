//! The `plp` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 input data or config error,
//! 3 numerical failure. Nothing is written unless the whole command succeeds.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod input;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Emission;
use error::{CliError, CliResult};

pub fn execute(cli: Cli) -> CliResult<Vec<Emission>> {
    match cli.command {
        Command::Mle(a) => commands::cmd_mle(a),
        Command::Bayes(a) => commands::cmd_bayes(a),
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::Curve(a) => commands::cmd_curve(a),
    }
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(format!(".tmp{}", std::process::id()));
    path.with_file_name(name)
}

/// Writes files through temporaries renamed into place, so a failed write
/// leaves no target file behind.
fn flush(emissions: Vec<Emission>) -> CliResult<()> {
    let mut staged = Vec::new();
    for e in &emissions {
        if let Emission::File(path, text) = e {
            let tmp = temp_path(path);
            if let Err(err) = fs::write(&tmp, text) {
                for (t, _) in &staged {
                    let _ = fs::remove_file(t);
                }
                return Err(CliError::Input(format!("cannot write {}: {err}", path.display())));
            }
            staged.push((tmp, path.clone()));
        }
    }
    for (tmp, path) in staged {
        fs::rename(&tmp, &path)
            .map_err(|err| CliError::Input(format!("cannot write {}: {err}", path.display())))?;
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    for e in emissions {
        match e {
            Emission::Stdout(text) => {
                let _ = lock.write_all(text.as_bytes());
            }
            Emission::Stderr(text) => eprint!("{text}"),
            Emission::File(..) => {}
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli).and_then(flush) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
