//! Command-line driver for `cascade-core`.
//!
//! Each subcommand runs one module pipeline and writes CSV files plus a
//! `run.cfg` (the resolved parameters, reusable as `--config`) and a
//! `manifest.csv` with the SHA-256 of every file.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod params;

use std::ffi::OsString;

use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches};

pub use args::{Cli, OUT_DIR_ENV};
pub use commands::{run, CommandKind, RunManifest};
pub use error::{CliError, Result};
pub use output::{ManifestEntry, MANIFEST_FILE, RUN_CONFIG_FILE};
pub use params::Params;

/// Global flags that are not pipeline parameters.
const NON_PARAMETER_IDS: [&str; 2] = ["out", "config"];

/// Parses arguments, runs the command and returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match manifest_from_matches(&matches).and_then(|m| run(&m)) {
        Ok(entries) => {
            log::info!("wrote {} files", entries.len() + 1);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Merges the config file with flags given on the command line.
pub fn manifest_from_matches(matches: &ArgMatches) -> Result<RunManifest> {
    let cli = Cli::from_arg_matches(matches).map_err(|e| CliError::param("arguments", e.to_string()))?;
    let (name, sub) = matches
        .subcommand()
        .ok_or_else(|| CliError::param("command", "missing subcommand"))?;
    let command: CommandKind = name.parse()?;

    let definition = Cli::command();
    let sub_definition = definition
        .find_subcommand(name)
        .ok_or_else(|| CliError::param("command", format!("unknown command `{name}`")))?;
    let mut keys: Vec<(String, String)> = sub_definition
        .get_arguments()
        .filter_map(|a| a.get_long().map(|l| (a.get_id().to_string(), l.to_owned())))
        .collect();
    keys.push(("seed".into(), "seed".into()));
    let allowed: Vec<String> = keys.iter().map(|(_, long)| long.clone()).collect();

    let mut params = match &cli.config {
        Some(path) => Params::from_file(path)?,
        None => Params::new(),
    };
    params.check_keys(&allowed)?;
    for (id, long) in &keys {
        if NON_PARAMETER_IDS.contains(&id.as_str()) || sub.value_source(id) != Some(ValueSource::CommandLine) {
            continue;
        }
        if let Some(raw) = sub.get_raw(id) {
            let values: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            params.set(long, values.join(","));
        }
    }
    let seed = match params.remove("seed") {
        Some(s) => s.parse().map_err(|e| CliError::param("seed", format!("cannot parse `{s}`: {e}")))?,
        None => 0,
    };
    Ok(RunManifest { command, parameters: params, output_dir: cli.out, seed })
}
