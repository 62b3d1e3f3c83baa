// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form macro-dipole predictions.

use crate::{Error, Result, C64};

/// |ρ_eg·N·g·t|², the photon number radiated by a classical macro-dipole.
pub fn short_time_photon_number(coherence: C64, n_atoms: f64, coupling: f64, t: f64) -> f64 {
    (coherence.norm() * n_atoms * coupling * t).powi(2)
}

/// √n₀ / (|ρ_eg|·N·g): time for the macro-dipole to absorb n₀ photons.
pub fn complete_absorption_time(photons: f64, coherence: C64, n_atoms: f64, coupling: f64) -> Result<f64> {
    if !(photons > 0.0) {
        return Err(Error::InvalidParameter {
            field: "n0",
            reason: format!("photon number must be positive, got {photons}"),
        });
    }
    let rate = coherence.norm() * n_atoms * coupling;
    if coherence.norm() == 0.0 {
        return Err(Error::NoCoherence);
    }
    if !(rate > 0.0) {
        return Err(Error::InvalidParameter {
            field: "g",
            reason: "collective coupling must be positive".into(),
        });
    }
    Ok(photons.sqrt() / rate)
}
