// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Superradiance and superabsorption of N two-level atoms coupled to one
//! damped cavity mode.
//!
//! The atoms are described in the symmetric Dicke sector |J = N/2, m⟩ and
//! the field in a truncated Fock basis |0..n_max⟩. Joint operators and states
//! use a fixed tensor ordering: field index slow, atomic index fast, so the
//! joint index of |n⟩_f |k⟩_a (k excited atoms) is `n * (N + 1) + k`.
//!
//! Units: ħ = 1, rates in rad/s, times in seconds.
//!
//! Modules:
//! - [`hilbert`]: basis labels and operator matrices.
//! - [`states`]: coherent, vacuum and pump-prepared initial states.
//! - [`dynamics`]: unitary and Lindblad propagation with sampled observables.
//! - [`experiments`]: scenario runners, accounting, turning points, fits.
//! - [`oracle`]: brute-force product-space references used for validation.

// `!(x > 0.0)` style checks reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod experiments;
pub mod hilbert;
pub mod oracle;
pub mod states;

mod error;

pub use error::{Error, Result};

/// Complex scalar used for all amplitudes and matrix entries.
pub type C64 = num_complex::Complex64;
