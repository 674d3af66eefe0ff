//! Command-line driver: run configuration, state inputs, subcommands and atomic output.

pub mod args;
pub mod commands;
pub mod config;
pub mod input;
pub mod output;

use std::ffi::OsString;

use anyhow::Context;
use clap::Parser;

pub use commands::run;
pub use config::RunConfig;

/// Parse arguments, run, and write the result. Errors leave no output file.
pub fn main_with_args<I, T>(args: I, threads: Option<&str>) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = args::Cli::try_parse_from(args)?;
    let base = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::from_json_str(&text).with_context(|| format!("invalid config {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    let cfg = cli.merge_into(base);
    cfg.validate()?;
    output::configure_threads(threads)?;
    let content = run(&cfg)?;
    output::write_output(cfg.output.as_deref(), &content)
}
