// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

use clap::Parser;
use superabsorb_cli::{execute, report, Args};

fn main() {
    let args = Args::parse();
    if let Err(e) = execute(&args) {
        std::process::exit(report(&args.out, &e));
    }
}
