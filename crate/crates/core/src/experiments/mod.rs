// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Scenario runners and their analysis.

mod analysis;
mod formulas;
mod params;
mod runs;

pub use analysis::{
    absorption_accounting, equivalent_atom_number, find_turning_point, fit_power_law,
    predicted_absorption_time, run_accounting, scaling_point, scaling_sweep, AbsorptionAccounting,
    PowerLawFit, ScalingPoint, TurningPoint, ACCOUNTING_TOL, EQUIVALENT_ATOMS_MAX, SWEEP_MAX_ITERATIONS,
    SWEEP_TIME_TOL,
};
pub use formulas::{complete_absorption_time, short_time_photon_number};
pub use params::{AtomNumberDistribution, ImperfectionModel, InitialField, ScenarioSpec, SystemParams};
pub use runs::{
    run_aperture_scan, run_ordinary_absorption, run_pump_off, run_reversal, run_superabsorption,
    run_superradiance, superradiant_amplitude, AtomReset, FinalState, PumpOffRun, ReversalOutcome,
    ReversalVariant, Run, ScanResult, SuperradiantAmplitude, COHERENT_PURITY_WARNING,
};
