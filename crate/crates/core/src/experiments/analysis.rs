// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::formulas::complete_absorption_time;
use super::params::{InitialField, ScenarioSpec};
use super::runs::{run_ordinary_absorption, run_pump_off, run_superabsorption, AtomReset};
use crate::dynamics::TimeSeries;
use crate::states::atomic_coherence;
use crate::{Error, Result};

/// Relative tolerance of the photon bookkeeping identity.
pub const ACCOUNTING_TOL: f64 = 1e-3;

/// Photon bookkeeping over [0, t_ab].
///
/// The field side gives
/// `n_absorbed = n_initial − n_remaining − n_decayed + n_spont`.
/// `n_spont` counts photons fed into the cavity by the atomic decay
/// channel. Collective atomic decay here radiates into free space, so it is
/// zero; the free-space loss is reported as `n_atomic_loss` instead.
///
/// `n_absorbed_atomic` is the same quantity from the atoms alone:
/// gained excitation ΔJ_z plus the excitation lost to free space. The two
/// sides are integrated independently, so their agreement checks the
/// integration rather than restating a definition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AbsorptionAccounting {
    pub t_ab: f64,
    pub n_initial: f64,
    pub n_remaining: f64,
    pub n_decayed: f64,
    pub n_spont: f64,
    pub n_absorbed: f64,
    pub ratio: f64,
    pub n_atomic_loss: f64,
    pub n_absorbed_atomic: f64,
}

impl AbsorptionAccounting {
    /// n_initial − (n_remaining + n_decayed + n_absorbed_atomic − n_spont).
    pub fn residual(&self) -> f64 {
        self.n_initial - (self.n_remaining + self.n_decayed + self.n_absorbed_atomic - self.n_spont)
    }

    pub fn holds_within(&self, rel_tol: f64) -> bool {
        self.residual().abs() <= rel_tol * self.n_initial
    }
}

/// Trapezoidal integral of sampled `values` from the first sample to `t_end`.
fn integrate_to(times: &[f64], values: &[f64], t_end: f64) -> f64 {
    let mut acc = 0.0;
    for i in 1..times.len() {
        let (t0, t1) = (times[i - 1], times[i]);
        if t0 >= t_end {
            break;
        }
        let (v0, v1) = (values[i - 1], values[i]);
        if t1 <= t_end {
            acc += 0.5 * (v0 + v1) * (t1 - t0);
        } else {
            let v = v0 + (v1 - v0) * (t_end - t0) / (t1 - t0);
            acc += 0.5 * (v0 + v) * (t_end - t0);
        }
    }
    acc
}

/// Integral of a piecewise series whose value jumps at `split`: the sample
/// at `split` belongs to the left piece and `right_start` opens the right one.
fn integrate_split(times: &[f64], values: &[f64], t_end: f64, split: f64, right_start: f64) -> f64 {
    let cut = times.partition_point(|&t| t <= split);
    let left = integrate_to(&times[..cut], &values[..cut], t_end.min(split));
    if t_end <= split {
        return left;
    }
    let mut t = vec![split];
    t.extend_from_slice(&times[cut..]);
    let mut v = vec![right_start];
    v.extend_from_slice(&values[cut..]);
    left + integrate_to(&t, &v, t_end)
}

/// Bookkeeping for `series` up to `t_ab`, with cavity and atomic rates
/// taken from `spec`. `reset` marks an atom replacement inside the run.
///
/// Fails when the field and atomic balances disagree by more than
/// [`ACCOUNTING_TOL`] of the initial photons, which means the series does
/// not belong to `spec` or is too coarsely sampled.
pub fn absorption_accounting(
    series: &TimeSeries,
    t_ab: f64,
    spec: &ScenarioSpec,
    reset: Option<&AtomReset>,
) -> Result<AbsorptionAccounting> {
    let (Some(&start), Some(&end)) = (series.times.first(), series.times.last()) else {
        return Err(Error::Accounting("empty series".into()));
    };
    if !(t_ab > start) || t_ab > end * (1.0 + 1e-12) {
        return Err(Error::Accounting(format!(
            "t_ab = {t_ab} outside the sampled range [{start}, {end}]"
        )));
    }
    let t_ab = t_ab.min(end);
    let n_initial = series.mean_n[0];
    if !(n_initial > 0.0) {
        return Err(Error::Accounting("no photons at t = 0".into()));
    }
    let n_remaining = series.interpolate(&series.mean_n, t_ab).expect("in range");
    let n_decayed = 2.0 * spec.params.cavity_rate * integrate_to(&series.times, &series.mean_n, t_ab);
    let diss = spec.params.dissipation()?;
    let gamma_a = diss.effective_atomic_rate();
    let reset = reset.filter(|r| r.time < t_ab);
    let (loss_integral, jz_gain) = match reset {
        None => {
            let jz_end = series.interpolate(&series.mean_jz, t_ab).expect("in range");
            (
                integrate_to(&series.times, &series.mean_jplus_jminus, t_ab),
                jz_end - series.mean_jz[0],
            )
        }
        Some(r) => {
            // fresh atoms start in the ground state, where ⟨J⁺J⁻⟩ = 0
            let loss = integrate_split(&series.times, &series.mean_jplus_jminus, t_ab, r.time, 0.0);
            let cut = series.times.partition_point(|&t| t <= r.time);
            let mut t = vec![r.time];
            t.extend_from_slice(&series.times[cut..]);
            let mut v = vec![r.jz_after];
            v.extend_from_slice(&series.mean_jz[cut..]);
            let tail = TimeSeries {
                times: t,
                ..Default::default()
            };
            let jz_end = tail.interpolate(&v, t_ab).expect("in range");
            (loss, (r.jz_before - series.mean_jz[0]) + (jz_end - r.jz_after))
        }
    };
    let n_atomic_loss = 2.0 * gamma_a * loss_integral;
    let n_spont = 0.0;
    let n_absorbed = n_initial - n_remaining - n_decayed + n_spont;
    let n_absorbed_atomic = jz_gain + n_atomic_loss;
    let out = AbsorptionAccounting {
        t_ab,
        n_initial,
        n_remaining,
        n_decayed,
        n_spont,
        n_absorbed,
        ratio: n_absorbed / n_initial,
        n_atomic_loss,
        n_absorbed_atomic,
    };
    // n_absorbed < 0 is legitimate net emission; only disagreeing sides are an error
    if !out.holds_within(ACCOUNTING_TOL) {
        return Err(Error::Accounting(format!(
            "field and atomic balances differ by {:.3e} of {n_initial:.6e} photons",
            out.residual()
        )));
    }
    Ok(out)
}

/// Runs the scenario up to `t_ab` and books its photons.
///
/// Unpumped atoms run as ordinary absorption, pumped ones as
/// superabsorption, and a set `pump_off_at` as a pump-off run.
pub fn run_accounting(spec: &ScenarioSpec, t_ab: f64) -> Result<AbsorptionAccounting> {
    let mut s = spec.clone();
    s.duration = t_ab;
    if let Some(off) = s.pump_off_at {
        s.pump_off_at = Some(off.min(t_ab));
        let run = run_pump_off(&s)?;
        return absorption_accounting(&run.series, t_ab, &s, run.reset.as_ref());
    }
    let series = if s.pump.pulse_area() == 0.0 {
        run_ordinary_absorption(&s)?
    } else {
        run_superabsorption(&s)?
    };
    absorption_accounting(&series, t_ab, &s, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TurningPoint {
    pub time: f64,
    pub mean_n: f64,
}

/// Global minimum of ⟨n(t)⟩ refined by a parabola through the neighboring
/// samples.
pub fn find_turning_point(series: &TimeSeries) -> Result<TurningPoint> {
    let n = &series.mean_n;
    let (i, _) = n
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::NoTurningPoint)?;
    if i == 0 || i + 1 == n.len() {
        return Err(Error::NoTurningPoint);
    }
    let t = &series.times;
    let (x0, x1, x2) = (t[i - 1], t[i], t[i + 1]);
    let (y0, y1, y2) = (n[i - 1], n[i], n[i + 1]);
    // Newton form of the interpolating parabola
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let c = (d12 - d01) / (x2 - x0);
    if !(c > 0.0) {
        return Ok(TurningPoint { time: x1, mean_n: y1 });
    }
    let b = d01 - c * (x0 + x1);
    let time = (-b / (2.0 * c)).clamp(x0, x2);
    let value = y0 + d01 * (time - x0) + c * (time - x0) * (time - x1);
    Ok(TurningPoint {
        time,
        mean_n: value.clamp(0.0, y1),
    })
}

/// Least-squares line through (ln x, ln y).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub stderr_exponent: f64,
    pub r_squared: f64,
}

impl PowerLawFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.prefactor * x.powf(self.exponent)
    }
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(p.0 > 0.0 && p.1 > 0.0) || !p.0.is_finite() || !p.1.is_finite())
    {
        return Err(Error::Fit(format!("non-positive point ({}, {})", p.0, p.1)));
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("all x values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let q = sxy / sxx;
    let intercept = my - q * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - q * x).powi(2))
        .sum();
    let stderr = if points.len() > 2 {
        (sse / (m - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    let r_squared = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(PowerLawFit {
        prefactor: intercept.exp(),
        exponent: q,
        stderr_exponent: stderr,
        r_squared,
    })
}

/// One point of a fixed-t₀ sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub atoms: f64,
    /// Input photon number n₀ = |α|² found by the search.
    pub photons: f64,
    pub turning_time: f64,
    pub turning_mean_n: f64,
    pub n_absorbed: f64,
    pub accounting: AbsorptionAccounting,
}

/// Largest number of turning-time evaluations per atom number.
pub const SWEEP_MAX_ITERATIONS: usize = 60;
/// The turning point is matched to t₀ within this relative error.
pub const SWEEP_TIME_TOL: f64 = 1e-3;

/// Turning time of a superabsorption run with `amplitude`, or infinity when
/// ⟨n⟩ still falls at the end of the window.
fn turning_time(spec: &ScenarioSpec, amplitude: f64) -> Result<(f64, TimeSeries)> {
    let mut s = spec.clone();
    s.initial_field = InitialField::Opposed(amplitude * amplitude);
    let series = run_superabsorption(&s)?;
    match find_turning_point(&series) {
        Ok(tp) => Ok((tp.time, series)),
        Err(Error::NoTurningPoint) => {
            let n = &series.mean_n;
            if n[n.len() - 1] <= n[n.len() - 2] {
                Ok((f64::INFINITY, series))
            } else {
                Ok((0.0, series))
            }
        }
        Err(e) => Err(e),
    }
}

/// Input amplitude whose turning point lands at `t0`, searched from the
/// macro-dipole estimate.
fn match_turning_point(spec: &ScenarioSpec, t0: f64) -> Result<(f64, f64, TimeSeries)> {
    let coherence = atomic_coherence(&spec.pump).norm();
    let collective = spec.params.coupling * spec.params.mean_atoms;
    let guess = coherence * collective * t0;
    if !(guess > 0.0) {
        return Err(Error::NoCoherence);
    }
    let mut evals = 0;
    let mut eval = |a: f64| -> Result<(f64, TimeSeries)> {
        evals += 1;
        if evals > SWEEP_MAX_ITERATIONS {
            return Err(Error::NoConvergence(SWEEP_MAX_ITERATIONS));
        }
        turning_time(spec, a)
    };
    let done = |t: f64| (t - t0).abs() <= SWEEP_TIME_TOL * t0;

    let (mut lo, mut hi) = (guess, guess);
    let (mut t_lo, mut s_lo) = eval(guess)?;
    if done(t_lo) {
        return Ok((guess, t_lo, s_lo));
    }
    let (mut t_hi, mut s_hi) = (t_lo, s_lo.clone());
    if t_lo < t0 {
        // too early: grow the amplitude until the turn passes t0
        loop {
            hi *= 1.25;
            let (t, s) = eval(hi)?;
            if t >= t0 {
                t_hi = t;
                s_hi = s;
                break;
            }
            if t < t_lo {
                return Err(Error::Unreachable(format!(
                    "turning time peaks near {t_lo:.4e} s below t0 = {t0:.4e} s"
                )));
            }
            lo = hi;
            t_lo = t;
            s_lo = s;
        }
    } else {
        loop {
            lo /= 1.25;
            let (t, s) = eval(lo)?;
            if t <= t0 {
                t_lo = t;
                s_lo = s;
                break;
            }
            hi = lo;
            t_hi = t;
            s_hi = s;
        }
    }
    if done(t_lo) {
        return Ok((lo, t_lo, s_lo));
    }
    if done(t_hi) {
        return Ok((hi, t_hi, s_hi));
    }
    // Illinois regula falsi while both ends are finite, bisection otherwise
    let mut side = 0i8;
    let (mut f_lo, mut f_hi) = (t_lo - t0, t_hi - t0);
    loop {
        let mid = if f_hi.is_finite() {
            let m = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            if m > lo && m < hi {
                m
            } else {
                0.5 * (lo + hi)
            }
        } else {
            0.5 * (lo + hi)
        };
        let (t, s) = eval(mid)?;
        if done(t) {
            return Ok((mid, t, s));
        }
        let f = t - t0;
        if f < 0.0 {
            lo = mid;
            f_lo = f;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            f_hi = f;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
        if (hi - lo) <= 1e-12 * hi {
            return Err(Error::Unreachable(format!(
                "turning time jumps across t0 = {t0:.4e} s near amplitude {mid:.6}"
            )));
        }
    }
}

/// Input photon number whose turning point lands at `t0` for `atoms`
/// atoms, and the photons absorbed by then.
pub fn scaling_point(base: &ScenarioSpec, atoms: f64, t0: f64) -> Result<ScalingPoint> {
    if !(t0 > 0.0) {
        return Err(Error::InvalidParameter {
            field: "t0",
            reason: format!("must be positive, got {t0}"),
        });
    }
    let mut spec = base.with_params(base.params.with_atoms(atoms));
    spec.duration = 1.5 * t0;
    spec.pump_off_at = None;
    spec.validate()?;
    let (amp, t_turn, series) = match_turning_point(&spec, t0)?;
    let tp = find_turning_point(&series).unwrap_or(TurningPoint {
        time: t_turn,
        mean_n: f64::NAN,
    });
    spec.initial_field = InitialField::Opposed(amp * amp);
    let accounting = absorption_accounting(&series, t0, &spec, None)?;
    Ok(ScalingPoint {
        atoms,
        photons: amp * amp,
        turning_time: tp.time,
        turning_mean_n: tp.mean_n,
        n_absorbed: accounting.n_absorbed,
        accounting,
    })
}

/// [`scaling_point`] for each atom number; fails on the first failure.
pub fn scaling_sweep(base: &ScenarioSpec, atom_numbers: &[f64], t0: f64) -> Result<Vec<ScalingPoint>> {
    if atom_numbers.is_empty() {
        return Err(Error::InvalidParameter {
            field: "n_values",
            reason: "need at least one atom number".into(),
        });
    }
    atom_numbers.iter().map(|&n| scaling_point(base, n, t0)).collect()
}

/// Complete-absorption time of `spec` from its input photon number.
pub fn predicted_absorption_time(spec: &ScenarioSpec) -> Result<f64> {
    complete_absorption_time(
        spec.input_amplitude().norm_sqr(),
        atomic_coherence(&spec.pump),
        spec.params.mean_atoms,
        spec.params.coupling,
    )
}

/// Search window for [`equivalent_atom_number`].
pub const EQUIVALENT_ATOMS_MAX: f64 = 40.0;

/// Atom number at which ordinary absorption reaches `target_ratio` within
/// `t_ab`, with the input field of `base`.
///
/// Fractional atom numbers use the collective-coupling convention of
/// [`super::SystemParams`].
pub fn equivalent_atom_number(target_ratio: f64, base: &ScenarioSpec, t_ab: f64) -> Result<f64> {
    if !(target_ratio > 0.0 && target_ratio < 1.0) {
        return Err(Error::InvalidParameter {
            field: "target_ratio",
            reason: format!("must lie in (0, 1), got {target_ratio}"),
        });
    }
    let mut spec = base.clone();
    spec.pump = crate::states::PumpSpec::ground();
    spec.initial_field = InitialField::Coherent(base.input_amplitude());
    spec.pump_off_at = None;
    let ratio = |n: f64| -> Result<f64> {
        Ok(run_accounting(&spec.with_params(spec.params.with_atoms(n)), t_ab)?.ratio)
    };
    // bracket outward from the base atom number; the ratio grows with N
    let start = base.params.mean_atoms.max(0.5);
    let r_start = ratio(start)?;
    let (mut lo, mut hi) = (start, start);
    if r_start < target_ratio {
        loop {
            lo = hi;
            hi = (hi * 2.0).min(EQUIVALENT_ATOMS_MAX);
            if ratio(hi)? >= target_ratio {
                break;
            }
            if hi >= EQUIVALENT_ATOMS_MAX {
                return Err(Error::Unreachable(format!(
                    "ratio {target_ratio} not reached with {EQUIVALENT_ATOMS_MAX} atoms"
                )));
            }
        }
    } else {
        loop {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-3 {
                return Err(Error::Unreachable(format!(
                    "ratio {target_ratio} already exceeded with {hi} atoms"
                )));
            }
            if ratio(lo)? <= target_ratio {
                break;
            }
        }
    }
    for _ in 0..SWEEP_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if ratio(mid)? < target_ratio {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-6 * hi {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::NoConvergence(SWEEP_MAX_ITERATIONS))
}
