// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Result tables and the files they are written to.
//!
//! Everything except the wall-time sidecar is a pure function of the config
//! and seed, so repeated runs produce byte-identical files.

use std::fs;
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use superabsorb::dynamics::TimeSeries;

use crate::config::RawConfig;
use crate::error::CliError;

/// Version of the file layout below; bump on any column or key change.
pub const SCHEMA_VERSION: u32 = 1;

/// Frozen column order of the time-series table.
pub const SERIES_COLUMNS: [&str; 7] = [
    "t_ns",
    "mean_n",
    "mean_Jz",
    "re_mean_a",
    "im_mean_a",
    "trace",
    "tail",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Column-major numeric table.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn from_series(series: &TimeSeries) -> Self {
        let rows = (0..series.len())
            .map(|i| {
                vec![
                    series.times[i] * 1e9,
                    series.mean_n[i],
                    series.mean_jz[i],
                    series.mean_a[i].re,
                    series.mean_a[i].im,
                    series.trace_or_norm[i],
                    series.tail[i],
                ]
            })
            .collect();
        Self {
            name: "series",
            columns: SERIES_COLUMNS.to_vec(),
            rows,
        }
    }

    /// CSV with 17 significant digits per value.
    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::io("writing csv", e.into());
        w.write_record(&self.columns).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))
                .map_err(fail)?;
        }
        w.into_inner()
            .map_err(|e| CliError::io("writing csv", e.into_error()))
    }
}

/// Serialized as `{column: [values...]}` in column order.
impl Serialize for Table {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.columns.len()))?;
        for (j, name) in self.columns.iter().enumerate() {
            let column: Vec<f64> = self.rows.iter().map(|r| r[j]).collect();
            map.serialize_entry(name, &column)?;
        }
        map.end()
    }
}

/// Self-describing header of every run.
#[derive(Clone, Debug, Serialize)]
pub struct Meta<'a> {
    pub schema_version: u32,
    pub series_columns: Vec<&'static str>,
    pub code_version: &'static str,
    pub scenario: &'a str,
    pub seed: u64,
    pub format: Format,
    pub config: &'a RawConfig,
}

#[derive(Serialize)]
struct Combined<'a> {
    meta: &'a Meta<'a>,
    series: &'a Table,
    summary: &'a serde_json::Value,
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

fn json(value: &impl Serialize) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

/// Writes the table, summary and metadata in the chosen format.
pub fn write_run(
    dir: &Path,
    meta: &Meta,
    table: &Table,
    summary: &serde_json::Value,
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    match meta.format {
        Format::Csv => {
            write(dir, &format!("{}.csv", table.name), &table.to_csv()?)?;
            write(dir, "summary.json", &json(summary))?;
            write(dir, "meta.json", &json(meta))
        }
        Format::Json => write(
            dir,
            "result.json",
            &json(&Combined {
                meta,
                series: table,
                summary,
            }),
        ),
    }
}

pub fn write_wall_time(dir: &Path, seconds: f64) -> Result<(), CliError> {
    write(
        dir,
        "wall_time.json",
        &json(&serde_json::json!({ "wall_time_s": seconds })),
    )
}

pub fn write_error(dir: &Path, err: &CliError) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    write(
        dir,
        "error.json",
        &json(&serde_json::json!({ "error": err.record() })),
    )
}
