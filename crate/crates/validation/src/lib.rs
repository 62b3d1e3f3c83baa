// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance checks for the simulator live in `tests/acceptance.rs`.
//!
//! Run them with `cargo test -p superabsorb-validation --test acceptance`.
//! The package sorts after the library and CLI crates so that their test
//! suites always run first under `cargo test --workspace`.
