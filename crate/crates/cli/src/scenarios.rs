// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;
use serde_json::{json, Value};
use superabsorb::dynamics::linear_grid;
use superabsorb::experiments::{
    absorption_accounting, find_turning_point, fit_power_law, predicted_absorption_time, run_aperture_scan,
    run_ordinary_absorption, run_pump_off, run_reversal, run_superabsorption, run_superradiance,
    scaling_point, short_time_photon_number, AbsorptionAccounting, ScenarioSpec,
};
use superabsorb::hilbert::BasisSpec;
use superabsorb::oracle::{brute_force_evolve, compare_with_dicke, MAX_CUTOFF};
use superabsorb::states::{atomic_coherence, coherent_state};

use crate::config::{rename_field, Resolved};
use crate::error::CliError;
use crate::output::Table;

/// Largest final ⟨n⟩ accepted by the reversal check.
pub const REVERSAL_THRESHOLD: f64 = 1e-6;
/// Largest Dicke/product-space deviation accepted by the oracle check.
pub const ORACLE_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    Superradiance,
    Superabsorb,
    Ordinary,
    PumpOff,
    ApertureScan,
    Scaling,
    ReversalCheck,
    OracleCheck,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Superradiance => "superradiance",
            Scenario::Superabsorb => "superabsorb",
            Scenario::Ordinary => "ordinary",
            Scenario::PumpOff => "pump-off",
            Scenario::ApertureScan => "aperture-scan",
            Scenario::Scaling => "scaling",
            Scenario::ReversalCheck => "reversal-check",
            Scenario::OracleCheck => "oracle-check",
        }
    }
}

/// Result of one scenario. `check` carries the verdict of check scenarios.
pub struct Outcome {
    pub table: Table,
    pub summary: Value,
    pub check: Option<Result<(), String>>,
}

#[derive(Serialize)]
struct AccountingRecord {
    t_ab_ns: f64,
    n_initial: f64,
    n_remaining: f64,
    n_decayed: f64,
    n_spont: f64,
    n_absorbed: f64,
    ratio: f64,
    n_atomic_loss: f64,
    n_absorbed_atomic: f64,
}

impl From<AbsorptionAccounting> for AccountingRecord {
    fn from(a: AbsorptionAccounting) -> Self {
        Self {
            t_ab_ns: a.t_ab * 1e9,
            n_initial: a.n_initial,
            n_remaining: a.n_remaining,
            n_decayed: a.n_decayed,
            n_spont: a.n_spont,
            n_absorbed: a.n_absorbed,
            ratio: a.ratio,
            n_atomic_loss: a.n_atomic_loss,
            n_absorbed_atomic: a.n_absorbed_atomic,
        }
    }
}

fn core<T>(r: superabsorb::Result<T>) -> Result<T, CliError> {
    r.map_err(rename_field)
}

fn missing_section(section: &str, scenario: Scenario) -> CliError {
    CliError::Config {
        field: section.to_string(),
        message: format!("section required by the {} scenario", scenario.name()),
    }
}

fn predicted_t0(spec: &ScenarioSpec) -> Option<f64> {
    predicted_absorption_time(spec).ok()
}

pub fn run(scenario: Scenario, cfg: &Resolved) -> Result<Outcome, CliError> {
    let spec = &cfg.spec;
    let plain = |series: &superabsorb::dynamics::TimeSeries, summary: Value| Outcome {
        table: Table::from_series(series),
        summary,
        check: None,
    };
    match scenario {
        Scenario::Superradiance => {
            let ts = core(run_superradiance(spec))?;
            let last = ts.len() - 1;
            let coherence = atomic_coherence(&spec.pump);
            Ok(plain(
                &ts,
                json!({
                    "final_mean_n": ts.mean_n[last],
                    "final_mean_a": [ts.mean_a[last].re, ts.mean_a[last].im],
                    "macro_dipole_mean_n": short_time_photon_number(
                        coherence, spec.params.mean_atoms, spec.params.coupling, spec.duration),
                }),
            ))
        }
        Scenario::Superabsorb => {
            let ts = core(run_superabsorption(spec))?;
            let t0 = predicted_t0(spec);
            let t_ab = cfg
                .t_ab
                .or(t0.filter(|t| *t <= spec.duration))
                .unwrap_or(spec.duration);
            let acc = core(absorption_accounting(&ts, t_ab, spec, None))?;
            let turning = find_turning_point(&ts)
                .ok()
                .map(|tp| json!({"t_ns": tp.time * 1e9, "mean_n": tp.mean_n}));
            Ok(plain(
                &ts,
                json!({
                    "predicted_t0_ns": t0.map(|t| t * 1e9),
                    "turning_point": turning,
                    "accounting": AccountingRecord::from(acc),
                }),
            ))
        }
        Scenario::Ordinary => {
            let ts = core(run_ordinary_absorption(spec))?;
            let acc = core(absorption_accounting(
                &ts,
                cfg.t_ab.unwrap_or(spec.duration),
                spec,
                None,
            ))?;
            Ok(plain(&ts, json!({ "accounting": AccountingRecord::from(acc) })))
        }
        Scenario::PumpOff => {
            let run = core(run_pump_off(spec))?;
            let t_ab = cfg.t_ab.unwrap_or(spec.duration);
            let acc = core(absorption_accounting(&run.series, t_ab, spec, run.reset.as_ref()))?;
            let reset = run.reset.map(
                |r| json!({"t_ns": r.time * 1e9, "mean_Jz_before": r.jz_before, "mean_Jz_after": r.jz_after}),
            );
            Ok(plain(
                &run.series,
                json!({ "reset": reset, "accounting": AccountingRecord::from(acc) }),
            ))
        }
        Scenario::ApertureScan => {
            let scan_cfg = cfg
                .scan
                .as_ref()
                .ok_or_else(|| missing_section("scan", scenario))?;
            let scan = core(run_aperture_scan(spec, &scan_cfg.offsets, scan_cfg.wavelength))?;
            let rows = (0..scan.offsets.len())
                .map(|i| {
                    vec![
                        scan.offsets[i] * 1e9,
                        scan.offsets[i] / scan_cfg.wavelength,
                        scan.superposition[i],
                        scan.excited[i],
                    ]
                })
                .collect();
            Ok(Outcome {
                table: Table {
                    name: "scan",
                    columns: vec!["dz_nm", "dz_over_lambda", "norm_n_pumped", "norm_n_excited"],
                    rows,
                },
                summary: json!({
                    "reference_mean_n": scan.reference,
                    "wavelength_nm": scan_cfg.wavelength * 1e9,
                }),
                check: None,
            })
        }
        Scenario::Scaling => {
            let sweep = cfg
                .scaling
                .as_ref()
                .ok_or_else(|| missing_section("scaling", scenario))?;
            let mut rows = Vec::new();
            let mut points = Vec::new();
            let mut status = Vec::new();
            for &n in &sweep.n_values {
                match scaling_point(spec, n, sweep.t0) {
                    Ok(p) => {
                        rows.push(vec![
                            n,
                            p.photons,
                            p.turning_time * 1e9,
                            p.turning_mean_n,
                            p.n_absorbed,
                        ]);
                        points.push((n, p.n_absorbed));
                        status.push(json!({"n_atoms": n, "status": "ok"}));
                    }
                    Err(e) => {
                        rows.push(vec![n, f64::NAN, f64::NAN, f64::NAN, f64::NAN]);
                        status.push(json!({"n_atoms": n, "status": "failed", "error": e.to_string()}));
                    }
                }
            }
            let fit = match fit_power_law(&points) {
                Ok(f) => json!({
                    "prefactor": f.prefactor,
                    "q": f.exponent,
                    "stderr_q": f.stderr_exponent,
                    "r_squared": f.r_squared,
                }),
                Err(e) => json!({ "error": e.to_string() }),
            };
            Ok(Outcome {
                table: Table {
                    name: "scaling",
                    columns: vec!["n_atoms", "n0", "turning_time_ns", "turning_mean_n", "n_absorbed"],
                    rows,
                },
                summary: json!({ "t0_ns": sweep.t0 * 1e9, "points": status, "fit": fit }),
                check: None,
            })
        }
        Scenario::ReversalCheck => {
            let r = core(run_reversal(spec, spec.duration, cfg.reversal))?;
            let passed = r.final_mean_n < REVERSAL_THRESHOLD;
            Ok(Outcome {
                table: Table::from_series(&r.series),
                summary: json!({
                    "forward_mean_n": r.forward_mean_n,
                    "final_mean_n": r.final_mean_n,
                    "atomic_fidelity": r.atomic_fidelity,
                    "variant": cfg.echo.run.reversal,
                    "threshold": REVERSAL_THRESHOLD,
                    "passed": passed,
                }),
                check: Some(if passed {
                    Ok(())
                } else {
                    Err(format!(
                        "final mean photon number {:.3e} >= {REVERSAL_THRESHOLD:e}",
                        r.final_mean_n
                    ))
                }),
            })
        }
        Scenario::OracleCheck => {
            let p = &spec.params;
            if p.mean_atoms.fract() != 0.0 || p.mean_atoms < 1.0 {
                return Err(CliError::Config {
                    field: "system.n_atoms".into(),
                    message: "the oracle needs an integer atom number".into(),
                });
            }
            let n = p.simulated_atoms();
            let alpha = spec.input_amplitude();
            // both paths share the truncation, so the automatic cutoff is capped to the oracle's limit
            let cutoff = match p.fock_cutoff {
                Some(c) => c,
                None => p.cutoff_for(alpha.norm(), &spec.pump).min(MAX_CUTOFF),
            };
            let basis = core(BasisSpec::new(n, cutoff))?;
            let field = core(coherent_state(alpha, &basis))?;
            let grid = linear_grid(spec.duration, spec.intervals);
            let dev = core(compare_with_dicke(n, &spec.pump, &field, p.coupling, &grid))?;
            let ts = core(brute_force_evolve(n, &spec.pump, &field, p.coupling, &grid))?;
            let passed = dev.max() < ORACLE_THRESHOLD;
            Ok(Outcome {
                table: Table::from_series(&ts),
                summary: json!({
                    "max_dev_mean_n": dev.mean_n,
                    "max_dev_mean_Jz": dev.mean_jz,
                    "max_dev_mean_a": dev.mean_a,
                    "threshold": ORACLE_THRESHOLD,
                    "passed": passed,
                }),
                check: Some(if passed {
                    Ok(())
                } else {
                    Err(format!(
                        "Dicke and product-space paths differ by {:.3e}",
                        dev.max()
                    ))
                }),
            })
        }
    }
}
