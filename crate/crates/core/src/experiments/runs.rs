// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use super::params::{AtomNumberDistribution, InitialField, ScenarioSpec, SystemParams};
use crate::dynamics::{evolve_lindblad_sectors, evolve_unitary, SectorDensity, TimeSeries};
use crate::hilbert::{phase_flip_operator, tc_hamiltonian, BasisSpec};
use crate::states::{
    coherent_state, joint_product_state, joint_product_state_on, superposition_atomic_state, AtomicState,
    JointState, PumpSpec,
};
use crate::{Error, Result, C64};

/// Field purity below which the coherent-state picture is flagged.
pub const COHERENT_PURITY_WARNING: f64 = 0.99;

/// State reached at the end of a run.
#[derive(Clone, Debug)]
pub enum FinalState {
    Pure(JointState),
    Banded(SectorDensity),
}

impl FinalState {
    pub fn field_band(&self) -> (Vec<f64>, Vec<C64>) {
        match self {
            FinalState::Pure(s) => SectorDensity::from_joint(s).field_band(),
            FinalState::Banded(s) => s.field_band(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Run {
    pub series: TimeSeries,
    pub final_state: FinalState,
}

/// Exact evolution for closed systems, order-0/±1 master equation otherwise.
fn propagate(params: &SystemParams, state: &JointState, grid: &[f64]) -> Result<Run> {
    let basis = *state.basis();
    let h = tc_hamiltonian(&basis, params.effective_coupling())?;
    let settings = params.settings()?;
    if params.is_lossless() && state.is_pure() {
        let ev = evolve_unitary(state, &h, grid, &settings)?;
        return Ok(Run {
            series: ev.series,
            final_state: FinalState::Pure(ev.final_state),
        });
    }
    let ev = evolve_lindblad_sectors(
        &SectorDensity::from_joint(state),
        &h,
        &params.dissipation()?,
        grid,
        &settings,
    )?;
    Ok(Run {
        series: ev.series,
        final_state: FinalState::Banded(ev.final_state),
    })
}

fn initial_state(params: &SystemParams, pump: &PumpSpec, input: C64) -> Result<JointState> {
    let basis = params.basis_for(input.norm(), pump)?;
    let atom = superposition_atomic_state(basis.n_atoms(), pump)?;
    joint_product_state(&atom, &coherent_state(input, &basis)?)
}

/// Deterministic single run of `spec` without imperfections.
fn run_ideal(spec: &ScenarioSpec, grid: &[f64]) -> Result<Run> {
    let state = initial_state(&spec.params, &spec.pump, spec.input_amplitude())?;
    propagate(&spec.params, &state, grid)
}

/// Draws one imperfect realization of `spec`. The input field keeps the
/// phase set by the nominal pump.
fn perturbed(spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> Result<ScenarioSpec> {
    let model = spec.imperfections.expect("caller checks");
    let mut out = spec.clone();
    out.imperfections = None;
    out.initial_field = InitialField::Coherent(spec.input_amplitude());
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let scale = (1.0 + model.coupling_spread * unit.sample(rng)).max(0.0);
    out.params.coupling = spec.params.coupling * scale;
    let phase = spec.pump.phase() + model.phase_spread * unit.sample(rng);
    out.pump = PumpSpec::new(spec.pump.pulse_area(), phase)?;
    if model.atom_number == AtomNumberDistribution::Poisson {
        let mean = spec.params.mean_atoms;
        let n = if mean > 0.0 {
            Poisson::new(mean)
                .map_err(|e| Error::InvalidParameter {
                    field: "n_atoms",
                    reason: e.to_string(),
                })?
                .sample(rng)
        } else {
            0.0
        };
        out.params.mean_atoms = n;
        // a fixed cutoff chosen for ⟨N⟩ may be too small for a large draw
        if let Some(c) = spec.params.fock_cutoff {
            let extra = (n as usize).saturating_sub(spec.params.simulated_atoms());
            out.params.fock_cutoff = Some(c + extra);
        }
    }
    Ok(out)
}

/// Sample mean of several series on one grid.
fn average(series: &[TimeSeries]) -> TimeSeries {
    let mut out = series[0].clone();
    let k = series.len() as f64;
    for i in 0..out.len() {
        let mean = |f: &dyn Fn(&TimeSeries) -> f64| series.iter().map(f).sum::<f64>() / k;
        let mean_c = |f: &dyn Fn(&TimeSeries) -> C64| series.iter().map(f).sum::<C64>() / k;
        out.mean_n[i] = mean(&|s| s.mean_n[i]);
        out.mean_jz[i] = mean(&|s| s.mean_jz[i]);
        out.mean_a[i] = mean_c(&|s| s.mean_a[i]);
        out.trace_or_norm[i] = mean(&|s| s.trace_or_norm[i]);
        out.tail[i] = mean(&|s| s.tail[i]);
        out.mean_jminus[i] = mean_c(&|s| s.mean_jminus[i]);
        out.mean_adag_jminus[i] = mean_c(&|s| s.mean_adag_jminus[i]);
        out.mean_jplus_jminus[i] = mean(&|s| s.mean_jplus_jminus[i]);
    }
    out
}

/// Runs `body` once, or averages it over the imperfection model.
fn with_imperfections<T>(
    spec: &ScenarioSpec,
    body: impl Fn(&ScenarioSpec) -> Result<T>,
    combine: impl Fn(Vec<T>) -> T,
) -> Result<T> {
    spec.validate()?;
    match spec.imperfections {
        None => body(spec),
        Some(model) => {
            let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
            let mut results = Vec::with_capacity(model.samples);
            for _ in 0..model.samples {
                let sample = perturbed(spec, &mut rng)?;
                results.push(body(&sample)?);
            }
            Ok(combine(results))
        }
    }
}

/// Pumped atoms radiating into an initially empty cavity.
pub fn run_superradiance(spec: &ScenarioSpec) -> Result<TimeSeries> {
    if spec.input_amplitude() != C64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter {
            field: "initial_field",
            reason: "superradiance starts from the vacuum".into(),
        });
    }
    with_imperfections(spec, |s| Ok(run_ideal(s, &s.grid())?.series), |v| average(&v))
}

/// Pumped atoms next to a coherent input, typically phase-opposed.
pub fn run_superabsorption(spec: &ScenarioSpec) -> Result<TimeSeries> {
    if spec.input_amplitude() == C64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter {
            field: "initial_field",
            reason: "superabsorption needs a nonzero input field".into(),
        });
    }
    with_imperfections(spec, |s| Ok(run_ideal(s, &s.grid())?.series), |v| average(&v))
}

/// Ground-state atoms next to a coherent input.
pub fn run_ordinary_absorption(spec: &ScenarioSpec) -> Result<TimeSeries> {
    if spec.pump.pulse_area() != 0.0 {
        return Err(Error::InvalidParameter {
            field: "theta",
            reason: "ordinary absorption uses unpumped atoms (theta = 0)".into(),
        });
    }
    with_imperfections(spec, |s| Ok(run_ideal(s, &s.grid())?.series), |v| average(&v))
}

/// Replacement of the atomic ensemble at the pump switch-off.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomReset {
    pub time: f64,
    /// ⟨J_z⟩ of the outgoing atoms.
    pub jz_before: f64,
    /// ⟨J_z⟩ of the incoming ground-state atoms.
    pub jz_after: f64,
}

#[derive(Clone, Debug)]
pub struct PumpOffRun {
    pub series: TimeSeries,
    pub reset: Option<AtomReset>,
}

/// Superabsorption until `pump_off_at`, then fresh unpumped atoms with the
/// field left behind.
pub fn run_pump_off(spec: &ScenarioSpec) -> Result<PumpOffRun> {
    let off = spec.pump_off_at.ok_or(Error::InvalidParameter {
        field: "pump_off_at",
        reason: "pump-off run needs a switch time".into(),
    })?;
    if spec.input_amplitude() == C64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter {
            field: "initial_field",
            reason: "pump-off run starts as superabsorption and needs an input field".into(),
        });
    }
    with_imperfections(
        spec,
        |s| pump_off_once(s, off),
        |runs| {
            let k = runs.len() as f64;
            let reset = runs[0].reset.map(|r| AtomReset {
                time: r.time,
                jz_before: runs
                    .iter()
                    .map(|x| x.reset.map_or(0.0, |r| r.jz_before))
                    .sum::<f64>()
                    / k,
                jz_after: runs
                    .iter()
                    .map(|x| x.reset.map_or(0.0, |r| r.jz_after))
                    .sum::<f64>()
                    / k,
            });
            let series: Vec<TimeSeries> = runs.into_iter().map(|r| r.series).collect();
            PumpOffRun {
                series: average(&series),
                reset,
            }
        },
    )
}

fn pump_off_once(spec: &ScenarioSpec, off: f64) -> Result<PumpOffRun> {
    let grid = spec.grid();
    // grid points within rounding of the switch are the switch itself
    let tol = 1e-12 * spec.duration;
    let mut first: Vec<f64> = grid.iter().copied().filter(|&t| t < off - tol).collect();
    first.push(off);
    let state = initial_state(&spec.params, &spec.pump, spec.input_amplitude())?;
    let run = propagate(&spec.params, &state, &first)?;
    let mut series = run.series;
    let rest: Vec<f64> = grid.iter().copied().filter(|&t| t > off + tol).collect();
    if rest.is_empty() {
        return Ok(PumpOffRun { series, reset: None });
    }
    let jz_before = *series.mean_jz.last().expect("non-empty");
    let basis = *match &run.final_state {
        FinalState::Pure(s) => s.basis(),
        FinalState::Banded(s) => s.basis(),
    };
    let (pops, sub) = run.final_state.field_band();
    let fresh = SectorDensity::with_ground_atoms(basis, &pops, &sub)?;
    let mut second = vec![0.0];
    second.extend(rest.iter().map(|t| t - off));
    let h = tc_hamiltonian(&basis, spec.params.effective_coupling())?;
    let ev = evolve_lindblad_sectors(
        &fresh,
        &h,
        &spec.params.dissipation()?,
        &second,
        &spec.params.settings()?,
    )?;
    let jz_after = ev.series.mean_jz[0];
    // keep both sides of the switch apart: the post-switch t = off sample is dropped
    series.extend_shifted(&ev.series, off);
    Ok(PumpOffRun {
        series,
        reset: Some(AtomReset {
            time: off,
            jz_before,
            jz_after,
        }),
    })
}

/// ⟨a⟩ after forward superradiance, with the field purity as a diagnostic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperradiantAmplitude {
    pub alpha: C64,
    pub mean_n: f64,
    pub field_purity: f64,
}

impl SuperradiantAmplitude {
    /// Message when the field is too mixed for a coherent-state description.
    pub fn warning(&self) -> Option<String> {
        (self.field_purity < COHERENT_PURITY_WARNING).then(|| {
            format!(
                "field purity {:.4} below {COHERENT_PURITY_WARNING}: coherent-state picture degrading",
                self.field_purity
            )
        })
    }
}

fn lossless_only(params: &SystemParams) -> Result<()> {
    if !params.is_lossless() {
        return Err(Error::InvalidParameter {
            field: "gamma_c",
            reason: "this run is defined for lossless evolution only".into(),
        });
    }
    Ok(())
}

fn forward_superradiance(spec: &ScenarioSpec, t: f64) -> Result<(AtomicState, JointState)> {
    lossless_only(&spec.params)?;
    let basis = spec.params.basis_for(0.0, &spec.pump)?;
    let atom = superposition_atomic_state(basis.n_atoms(), &spec.pump)?;
    let state = joint_product_state(&atom, &crate::states::FieldState::vacuum(&basis))?;
    if t == 0.0 {
        return Ok((atom, state));
    }
    let h = tc_hamiltonian(&basis, spec.params.effective_coupling())?;
    let ev = evolve_unitary(&state, &h, &[0.0, t], &spec.params.settings()?)?;
    Ok((atom, ev.final_state))
}

/// Field amplitude radiated by the pumped atoms after a lossless interval `t`.
pub fn superradiant_amplitude(spec: &ScenarioSpec, t: f64) -> Result<SuperradiantAmplitude> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "t0",
            reason: format!("time must be non-negative, got {t}"),
        });
    }
    let (_, state) = forward_superradiance(spec, t)?;
    let obs = crate::dynamics::observables(&state);
    let rho_f = state.field_density();
    let field_purity = rho_f.iter().map(|c| c.norm_sqr()).sum();
    Ok(SuperradiantAmplitude {
        alpha: obs.mean_a,
        mean_n: obs.mean_n,
        field_purity,
    })
}

/// Outcome of a forward-then-reversed lossless run.
#[derive(Clone, Debug)]
pub struct ReversalOutcome {
    pub forward_alpha: C64,
    pub forward_mean_n: f64,
    pub final_mean_n: f64,
    pub atomic_fidelity: f64,
    pub series: TimeSeries,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReversalVariant {
    /// R_π applied to the exact joint state after emission.
    Exact,
    /// Dominant atomic eigenvector next to a coherent field −α with α = ⟨a⟩.
    CoherentApproximation,
}

/// Radiates for `t`, reverses the field and evolves for `t` again.
pub fn run_reversal(spec: &ScenarioSpec, t: f64, variant: ReversalVariant) -> Result<ReversalOutcome> {
    spec.validate()?;
    let (atom, emitted) = forward_superradiance(spec, t)?;
    let basis = *emitted.basis();
    let obs = crate::dynamics::observables(&emitted);
    let start = match variant {
        ReversalVariant::Exact => emitted.transformed(&phase_flip_operator(&basis))?,
        ReversalVariant::CoherentApproximation => {
            let dominant = dominant_atomic_state(&emitted)?;
            let cutoff = spec
                .params
                .cutoff_for(obs.mean_a.norm(), &spec.pump)
                .max(basis.fock_cutoff());
            let wide = BasisSpec::new(basis.n_atoms(), cutoff)?;
            joint_product_state_on(&wide, &dominant, &coherent_state(-obs.mean_a, &wide)?)?
        }
    };
    let h = tc_hamiltonian(start.basis(), spec.params.effective_coupling())?;
    let grid = crate::dynamics::linear_grid(t.max(f64::MIN_POSITIVE), spec.intervals);
    let ev = evolve_unitary(&start, &h, &grid, &spec.params.settings()?)?;
    let last = crate::dynamics::observables(&ev.final_state);
    Ok(ReversalOutcome {
        forward_alpha: obs.mean_a,
        forward_mean_n: obs.mean_n,
        final_mean_n: last.mean_n,
        atomic_fidelity: ev.final_state.atomic_fidelity(&atom)?,
        series: ev.series,
    })
}

/// Eigenvector of the reduced atomic state with the largest weight.
fn dominant_atomic_state(state: &JointState) -> Result<AtomicState> {
    let eig = state.atomic_density().symmetric_eigen();
    let (best, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let mut v = eig.eigenvectors.column(best).into_owned();
    // fix the global phase on the largest component for reproducibility
    let (pivot, _) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .expect("non-empty");
    let phase = v[pivot] / v[pivot].norm();
    v /= phase;
    AtomicState::from_amplitudes(v)
}

/// Photon number versus aperture offset for the pumped and fully excited states.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub offsets: Vec<f64>,
    /// ⟨n⟩ at the end of the run for the scenario pump, normalized.
    pub superposition: Vec<f64>,
    /// Same for Θ = π.
    pub excited: Vec<f64>,
    /// Peak of the unnormalized Θ = π scan.
    pub reference: f64,
}

/// Superradiance with coupling g·|cos(2πΔz/λ)| for each offset Δz.
///
/// The sign of the coupling only flips the field phase, which leaves ⟨n⟩
/// unchanged, so its magnitude is used.
pub fn run_aperture_scan(spec: &ScenarioSpec, offsets: &[f64], wavelength: f64) -> Result<ScanResult> {
    if !(wavelength > 0.0) || !wavelength.is_finite() {
        return Err(Error::InvalidParameter {
            field: "wavelength",
            reason: format!("must be positive, got {wavelength}"),
        });
    }
    if offsets.is_empty() {
        return Err(Error::InvalidParameter {
            field: "offsets",
            reason: "need at least one aperture offset".into(),
        });
    }
    let excited_pump = PumpSpec::new(std::f64::consts::PI, spec.pump.phase())?;
    let mut pumped = Vec::with_capacity(offsets.len());
    let mut excited = Vec::with_capacity(offsets.len());
    for &dz in offsets {
        let factor = (2.0 * std::f64::consts::PI * dz / wavelength).cos().abs();
        let mut s = spec.clone();
        s.initial_field = InitialField::Vacuum;
        s.params = s.params.with_coupling(spec.params.coupling * factor);
        let end = |s: &ScenarioSpec| -> Result<f64> {
            Ok(*run_superradiance(s)?.mean_n.last().expect("non-empty"))
        };
        pumped.push(end(&s)?);
        s.pump = excited_pump;
        excited.push(end(&s)?);
    }
    let reference = excited.iter().copied().fold(0.0, f64::max);
    if !(reference > 0.0) {
        return Err(Error::InvalidParameter {
            field: "offsets",
            reason: "the fully excited scan never radiates; nothing to normalize by".into(),
        });
    }
    Ok(ScanResult {
        offsets: offsets.to_vec(),
        superposition: pumped.iter().map(|v| v / reference).collect(),
        excited: excited.iter().map(|v| v / reference).collect(),
        reference,
    })
}
