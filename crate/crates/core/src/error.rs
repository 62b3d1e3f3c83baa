// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("basis tag mismatch: {0}")]
    BasisTag(String),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("Fock cutoff {cutoff} too small for coherent amplitude |alpha| = {amplitude} (need at least {required})")]
    CutoffTooSmall {
        cutoff: usize,
        amplitude: f64,
        required: usize,
    },

    #[error("Fock truncation tail {tail:e} exceeded threshold {threshold:e} at t = {time:e} s")]
    TailExceeded { tail: f64, threshold: f64, time: f64 },

    #[error("step guard violated: dt * rate = {0} > 0.05")]
    StepGuard(f64),

    #[error("density matrix lost positivity at t = {time:e} s (eigenvalue below -{tolerance:e})")]
    Positivity { time: f64, tolerance: f64 },

    #[error("invalid time grid: {0}")]
    TimeGrid(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("atomic coherence is zero: complete absorption never happens in finite time")]
    NoCoherence,

    #[error("series has no turning point (monotone photon number)")]
    NoTurningPoint,

    #[error("inconsistent accounting: {0}")]
    Accounting(String),

    #[error("power-law fit needs at least 3 positive points: {0}")]
    Fit(String),

    #[error("bisection did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("target unreachable: {0}")]
    Unreachable(String),

    #[error("oracle limited to 1..=3 atoms and cutoff <= 12, got N = {atoms}, n_max = {cutoff}")]
    OracleTooLarge { atoms: usize, cutoff: usize },
}
