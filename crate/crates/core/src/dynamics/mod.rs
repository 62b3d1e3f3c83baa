// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Time propagation of joint states and sampled observables.
//!
//! Closed systems are propagated exactly through a one-time
//! eigendecomposition of H. Open systems integrate
//!
//! dρ/dt = −i[H, ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})
//!
//! with L_cav = √(2γ_c) a and, optionally, L_atom = √(2γ_a) J⁻, using
//! fixed-step RK4. Both γ are half linewidths, so ⟨n⟩ decays at 2γ_c.

mod lindblad;
mod observables;
mod sectors;
mod unitary;

pub use lindblad::{evolve_lindblad, is_positive_within, jump_operators, POSITIVITY_TOL};
pub use observables::{observables, truncation_leak, Observables};
pub use sectors::{evolve_lindblad_sectors, SectorDensity, SectorEvolution};
pub use unitary::{evolve_unitary, Propagator};

use crate::states::JointState;
use crate::{Error, Result, C64};

/// Largest allowed `dt * max(g·N, 2γ_c, 2γ_a)` for RK4.
pub const STEP_GUARD: f64 = 0.05;

/// Default abort threshold on truncation-relevant population.
pub const DEFAULT_TAIL_ABORT: f64 = 1e-6;

/// Cavity and atomic damping, both given as half linewidths in rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DissipationSpec {
    cavity_rate: f64,
    atomic_rate: f64,
    enable_atomic_decay: bool,
}

impl DissipationSpec {
    pub fn new(cavity_rate: f64, atomic_rate: f64, enable_atomic_decay: bool) -> Result<Self> {
        for (field, rate) in [("gamma_c", cavity_rate), ("gamma_a", atomic_rate)] {
            if !rate.is_finite() || rate < 0.0 {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("rate must be finite and non-negative, got {rate}"),
                });
            }
        }
        Ok(Self {
            cavity_rate,
            atomic_rate,
            enable_atomic_decay,
        })
    }

    pub fn lossless() -> Self {
        Self {
            cavity_rate: 0.0,
            atomic_rate: 0.0,
            enable_atomic_decay: false,
        }
    }

    pub fn cavity_only(cavity_rate: f64) -> Result<Self> {
        Self::new(cavity_rate, 0.0, false)
    }

    pub fn cavity_rate(&self) -> f64 {
        self.cavity_rate
    }

    pub fn atomic_rate(&self) -> f64 {
        self.atomic_rate
    }

    pub fn atomic_decay_enabled(&self) -> bool {
        self.enable_atomic_decay && self.atomic_rate > 0.0
    }

    /// Rate actually applied to the collective atomic jump operator.
    pub fn effective_atomic_rate(&self) -> f64 {
        if self.atomic_decay_enabled() {
            self.atomic_rate
        } else {
            0.0
        }
    }

    pub fn is_lossless(&self) -> bool {
        self.cavity_rate == 0.0 && !self.atomic_decay_enabled()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Eigendecomposition,
    Rk4,
}

/// Step size, sampling and abort thresholds for one propagation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorSettings {
    /// RK4 step (s); also the base spacing of [`IntegratorSettings::grid`].
    pub dt: f64,
    /// Samples are taken every `sample_every` steps by [`IntegratorSettings::grid`].
    pub sample_every: usize,
    pub method: Method,
    pub tail_abort_threshold: f64,
    /// Collective coupling g·N entering the step guard (rad/s).
    pub coupling_scale: f64,
    /// Positivity is checked on every `positivity_every`-th sample; 0 disables it.
    pub positivity_every: usize,
}

impl IntegratorSettings {
    /// Largest step allowed by the guard for these rates.
    pub fn guarded(coupling_scale: f64, dissipation: &DissipationSpec) -> Self {
        let rate = guard_rate(coupling_scale, dissipation);
        let dt = if rate > 0.0 { STEP_GUARD / rate } else { 1.0 };
        Self {
            dt,
            sample_every: 1,
            method: Method::Eigendecomposition,
            tail_abort_threshold: DEFAULT_TAIL_ABORT,
            coupling_scale,
            positivity_every: 1,
        }
    }

    pub fn with_sample_every(mut self, sample_every: usize) -> Self {
        self.sample_every = sample_every.max(1);
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    /// `dt * max(g·N, 2γ_c, 2γ_a)`.
    pub fn guard_value(&self, dissipation: &DissipationSpec) -> f64 {
        self.dt * guard_rate(self.coupling_scale, dissipation)
    }

    pub fn check_guard(&self, dissipation: &DissipationSpec) -> Result<()> {
        let value = self.guard_value(dissipation);
        if !(self.dt > 0.0) || value > STEP_GUARD * (1.0 + 1e-12) {
            return Err(Error::StepGuard(value));
        }
        Ok(())
    }

    /// Uniform grid 0, h, 2h, … with h = dt·sample_every, ending exactly at
    /// `duration`.
    pub fn grid(&self, duration: f64) -> Vec<f64> {
        uniform_grid(duration, self.dt * self.sample_every as f64)
    }
}

fn guard_rate(coupling_scale: f64, dissipation: &DissipationSpec) -> f64 {
    coupling_scale
        .abs()
        .max(2.0 * dissipation.cavity_rate())
        .max(2.0 * dissipation.effective_atomic_rate())
}

/// Grid from 0 to `duration` with spacing at most `spacing`.
pub fn uniform_grid(duration: f64, spacing: f64) -> Vec<f64> {
    if !(duration > 0.0) || !(spacing > 0.0) {
        return vec![0.0];
    }
    let steps = (duration / spacing - 1e-9).ceil().max(1.0) as usize;
    (0..=steps).map(|i| duration * i as f64 / steps as f64).collect()
}

/// Grid from 0 to `duration` with exactly `intervals` intervals.
pub fn linear_grid(duration: f64, intervals: usize) -> Vec<f64> {
    let intervals = intervals.max(1);
    (0..=intervals)
        .map(|i| duration * i as f64 / intervals as f64)
        .collect()
}

/// Rejects empty grids, negative start times and non-increasing times.
pub fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::TimeGrid("empty time grid".into()));
    }
    if t_grid[0] < 0.0 || !t_grid[0].is_finite() {
        return Err(Error::TimeGrid("grid must start at t >= 0".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::TimeGrid("times must be strictly increasing".into()));
    }
    Ok(())
}

/// Observables sampled on a time grid.
///
/// Besides the plotted quantities this keeps the correlators needed for
/// photon bookkeeping: ⟨J⁻⟩, ⟨a†J⁻⟩ and ⟨J⁺J⁻⟩.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub mean_n: Vec<f64>,
    pub mean_jz: Vec<f64>,
    pub mean_a: Vec<C64>,
    pub trace_or_norm: Vec<f64>,
    pub tail: Vec<f64>,
    pub mean_jminus: Vec<C64>,
    pub mean_adag_jminus: Vec<C64>,
    pub mean_jplus_jminus: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, time: f64, obs: &Observables) {
        self.times.push(time);
        self.mean_n.push(obs.mean_n);
        self.mean_jz.push(obs.mean_jz);
        self.mean_a.push(obs.mean_a);
        self.trace_or_norm.push(obs.norm_or_trace);
        self.tail.push(obs.tail);
        self.mean_jminus.push(obs.mean_jminus);
        self.mean_adag_jminus.push(obs.mean_adag_jminus);
        self.mean_jplus_jminus.push(obs.mean_jplus_jminus);
    }

    /// Appends `other`, shifting its times by `offset` and dropping its first
    /// sample when it coincides with the current last one.
    pub fn extend_shifted(&mut self, other: &TimeSeries, offset: f64) {
        let skip = match (self.times.last(), other.times.first()) {
            (Some(&last), Some(&first)) if (first + offset - last).abs() <= 1e-15 * last.abs().max(1e-30) => {
                1
            }
            _ => 0,
        };
        for i in skip..other.len() {
            self.times.push(other.times[i] + offset);
            self.mean_n.push(other.mean_n[i]);
            self.mean_jz.push(other.mean_jz[i]);
            self.mean_a.push(other.mean_a[i]);
            self.trace_or_norm.push(other.trace_or_norm[i]);
            self.tail.push(other.tail[i]);
            self.mean_jminus.push(other.mean_jminus[i]);
            self.mean_adag_jminus.push(other.mean_adag_jminus[i]);
            self.mean_jplus_jminus.push(other.mean_jplus_jminus[i]);
        }
    }

    /// Samples up to and including index `end`.
    pub fn truncated(&self, end: usize) -> TimeSeries {
        let e = (end + 1).min(self.len());
        TimeSeries {
            times: self.times[..e].to_vec(),
            mean_n: self.mean_n[..e].to_vec(),
            mean_jz: self.mean_jz[..e].to_vec(),
            mean_a: self.mean_a[..e].to_vec(),
            trace_or_norm: self.trace_or_norm[..e].to_vec(),
            tail: self.tail[..e].to_vec(),
            mean_jminus: self.mean_jminus[..e].to_vec(),
            mean_adag_jminus: self.mean_adag_jminus[..e].to_vec(),
            mean_jplus_jminus: self.mean_jplus_jminus[..e].to_vec(),
        }
    }

    /// Index of the sample closest to `t`.
    pub fn nearest_index(&self, t: f64) -> Option<usize> {
        self.times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
    }

    /// Linear interpolation of a sampled real quantity at `t`.
    pub fn interpolate(&self, values: &[f64], t: f64) -> Option<f64> {
        let (first, last) = (*self.times.first()?, *self.times.last()?);
        if t < first - 1e-15 || t > last * (1.0 + 1e-12) + 1e-30 {
            return None;
        }
        let i = self.times.partition_point(|&s| s < t);
        if i == 0 {
            return Some(values[0]);
        }
        if i >= self.len() {
            return Some(values[self.len() - 1]);
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        Some(values[i - 1] * (1.0 - w) + values[i] * w)
    }
}

/// Sampled series plus the state at the last grid point.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub series: TimeSeries,
    pub final_state: JointState,
}
