// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end of the superabsorb simulator.
//!
//! `simulate <scenario> --config <file> --out <dir> [--seed S] [--format csv|json]`

// `!(x > 0.0)` style checks reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;
pub mod units;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;

pub use error::CliError;
use output::{Format, Meta};
use scenarios::Scenario;

#[derive(Debug, Parser)]
#[command(
    name = "simulate",
    version,
    about = "Superradiance and superabsorption in a damped cavity"
)]
pub struct Args {
    pub scenario: Scenario,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

/// Reads, resolves and runs one config, writing all outputs to `args.out`.
pub fn execute(args: &Args) -> Result<(), CliError> {
    let start = Instant::now();
    let source = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::io(format!("reading {}", args.config.display()), e))?;
    let raw = config::parse_toml(&source)?;
    let resolved = config::resolve(&raw, args.seed)?;
    let outcome = scenarios::run(args.scenario, &resolved)?;
    let meta = Meta {
        schema_version: output::SCHEMA_VERSION,
        series_columns: output::SERIES_COLUMNS.to_vec(),
        code_version: env!("CARGO_PKG_VERSION"),
        scenario: args.scenario.name(),
        seed: resolved.seed,
        format: args.format,
        config: &resolved.echo,
    };
    output::write_run(&args.out, &meta, &outcome.table, &outcome.summary)?;
    output::write_wall_time(&args.out, start.elapsed().as_secs_f64())?;
    match outcome.check {
        Some(Err(reason)) => Err(CliError::CheckFailed(reason)),
        _ => Ok(()),
    }
}

/// Reports `err` on stderr and, when possible, as `error.json` in `out`.
pub fn report(out: &Path, err: &CliError) -> i32 {
    let record = serde_json::json!({ "error": err.record() });
    eprintln!("{record}");
    let _ = output::write_error(out, err);
    err.exit_code()
}
