// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::dynamics::{DissipationSpec, IntegratorSettings};
use crate::hilbert::BasisSpec;
use crate::states::{coherent_cutoff, PumpSpec};
use crate::{Error, Result, C64};

/// Atom number, coupling and damping of one experiment.
///
/// `mean_atoms` may be fractional. The simulation then uses
/// `round(mean_atoms)` atoms (at least one) with the coupling rescaled so
/// that the collective coupling g·√N matches g·√⟨N⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub mean_atoms: f64,
    /// Single-atom coupling g (rad/s).
    pub coupling: f64,
    /// Cavity half linewidth γ_c (rad/s).
    pub cavity_rate: f64,
    /// Atomic half linewidth γ_a (rad/s).
    pub atomic_rate: f64,
    pub atomic_decay: bool,
    /// Fock cutoff; chosen from the input field and atom number when absent.
    pub fock_cutoff: Option<usize>,
}

impl SystemParams {
    pub fn lossless(mean_atoms: f64, coupling: f64) -> Self {
        Self {
            mean_atoms,
            coupling,
            cavity_rate: 0.0,
            atomic_rate: 0.0,
            atomic_decay: false,
            fock_cutoff: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64); 4] = [
            ("n_atoms", self.mean_atoms),
            ("g", self.coupling),
            ("gamma_c", self.cavity_rate),
            ("gamma_a", self.atomic_rate),
        ];
        for (field, v) in checks {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite and non-negative, got {v}"),
                });
            }
        }
        Ok(())
    }

    /// Integer atom number used in the simulation.
    pub fn simulated_atoms(&self) -> usize {
        (self.mean_atoms.round() as usize).max(1)
    }

    /// Coupling applied to each simulated atom.
    pub fn effective_coupling(&self) -> f64 {
        self.coupling * (self.mean_atoms / self.simulated_atoms() as f64).sqrt()
    }

    pub fn dissipation(&self) -> Result<DissipationSpec> {
        DissipationSpec::new(self.cavity_rate, self.atomic_rate, self.atomic_decay)
    }

    pub fn is_lossless(&self) -> bool {
        self.cavity_rate == 0.0 && !(self.atomic_decay && self.atomic_rate > 0.0)
    }

    /// Cutoff covering a coherent input of amplitude |α| plus everything the
    /// atoms can emit. Unpumped atoms start in the ground state and add no
    /// photons of their own.
    pub fn cutoff_for(&self, amplitude: f64, pump: &PumpSpec) -> usize {
        let emitters = if pump.pulse_area() == 0.0 {
            0
        } else {
            self.simulated_atoms()
        };
        self.fock_cutoff
            .unwrap_or_else(|| coherent_cutoff(amplitude) + emitters)
    }

    pub fn basis_for(&self, amplitude: f64, pump: &PumpSpec) -> Result<BasisSpec> {
        BasisSpec::new(self.simulated_atoms(), self.cutoff_for(amplitude, pump))
    }

    pub fn settings(&self) -> Result<IntegratorSettings> {
        let scale = self.effective_coupling() * self.simulated_atoms() as f64;
        Ok(IntegratorSettings::guarded(scale, &self.dissipation()?))
    }

    pub fn with_atoms(&self, mean_atoms: f64) -> Self {
        Self { mean_atoms, ..*self }
    }

    pub fn with_coupling(&self, coupling: f64) -> Self {
        Self { coupling, ..*self }
    }
}

/// Cavity field at t = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialField {
    Vacuum,
    Coherent(C64),
    /// Coherent state with the given mean photon number and the phase
    /// opposite to the field the pumped atoms would radiate.
    Opposed(f64),
}

impl InitialField {
    /// Coherent amplitude for a given pump.
    ///
    /// The atoms radiate along −i e^{−iφ₀}, so the opposed input is
    /// +i e^{−iφ₀} √n₀.
    pub fn amplitude(&self, pump: &PumpSpec) -> C64 {
        match *self {
            InitialField::Vacuum => C64::new(0.0, 0.0),
            InitialField::Coherent(a) => a,
            InitialField::Opposed(photons) => C64::from_polar(
                photons.max(0.0).sqrt(),
                std::f64::consts::FRAC_PI_2 - pump.phase(),
            ),
        }
    }
}

/// Distribution of the atom number in Monte Carlo runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomNumberDistribution {
    Fixed,
    Poisson,
}

/// Shot-to-shot imperfections averaged by Monte Carlo sampling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImperfectionModel {
    /// Relative spread Δg/g of the coupling.
    pub coupling_spread: f64,
    /// Spread of the pump phase φ₀ (rad).
    pub phase_spread: f64,
    pub atom_number: AtomNumberDistribution,
    /// Transit time τ (s); recorded only.
    pub transit_time: f64,
    pub samples: usize,
    pub seed: u64,
}

impl ImperfectionModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.coupling_spread >= 0.0) || !self.coupling_spread.is_finite() {
            return Err(Error::InvalidParameter {
                field: "coupling_spread",
                reason: "must be finite and non-negative".into(),
            });
        }
        if !(self.phase_spread >= 0.0) || !self.phase_spread.is_finite() {
            return Err(Error::InvalidParameter {
                field: "phase_spread",
                reason: "must be finite and non-negative".into(),
            });
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter {
                field: "mc_samples",
                reason: "need at least one sample".into(),
            });
        }
        Ok(())
    }
}

/// One simulated experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub params: SystemParams,
    pub pump: PumpSpec,
    pub initial_field: InitialField,
    /// Total simulated time (s).
    pub duration: f64,
    /// Number of sampling intervals on [0, duration].
    pub intervals: usize,
    pub pump_off_at: Option<f64>,
    pub imperfections: Option<ImperfectionModel>,
}

impl ScenarioSpec {
    pub fn new(params: SystemParams, pump: PumpSpec, initial_field: InitialField, duration: f64) -> Self {
        Self {
            params,
            pump,
            initial_field,
            duration,
            intervals: 400,
            pump_off_at: None,
            imperfections: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::InvalidParameter {
                field: "duration",
                reason: format!("must be positive, got {}", self.duration),
            });
        }
        if self.intervals == 0 {
            return Err(Error::InvalidParameter {
                field: "samples",
                reason: "need at least one sampling interval".into(),
            });
        }
        if let Some(t) = self.pump_off_at {
            if !(t > 0.0 && t <= self.duration) {
                return Err(Error::InvalidParameter {
                    field: "pump_off_at",
                    reason: format!("must lie in (0, duration], got {t}"),
                });
            }
        }
        if let Some(m) = &self.imperfections {
            m.validate()?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        crate::dynamics::linear_grid(self.duration, self.intervals)
    }

    pub fn input_amplitude(&self) -> C64 {
        self.initial_field.amplitude(&self.pump)
    }

    pub fn with_params(&self, params: SystemParams) -> Self {
        Self {
            params,
            ..self.clone()
        }
    }
}
