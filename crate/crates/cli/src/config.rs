// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration files.
//!
//! The same schema is read from TOML config files and from the `config`
//! object of a metadata record, so every emitted record parses back into the
//! spec that produced it. Provided values are echoed verbatim and defaults
//! are filled in, which makes the echo exact rather than a reformatting.

use serde::{Deserialize, Serialize};
use superabsorb::experiments::{
    superradiant_amplitude, AtomNumberDistribution, ImperfectionModel, InitialField, ReversalVariant,
    ScenarioSpec, SystemParams,
};
use superabsorb::states::PumpSpec;
use superabsorb::C64;

use crate::error::CliError;
use crate::units;

/// Keys without defaults.
pub const REQUIRED_KEYS: [&str; 7] = [
    "system.n_atoms",
    "system.g",
    "system.gamma_c",
    "system.gamma_a",
    "pump.theta",
    "field.kind",
    "run.duration",
];

/// A config value: unit-tagged text or a plain number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSystem {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_atoms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_c: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_a: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atomic_decay: Option<bool>,
    /// A level count or "auto".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fock_cutoff: Option<Value>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPump {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi0: Option<Value>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawField {
    /// vacuum, coherent, opposed or reversed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_im: Option<f64>,
    /// Emission time whose field is reversed (kind = "reversed").
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<Value>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRun {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_off_at: Option<Value>,
    /// Accounting window; scenario-dependent default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_ab: Option<Value>,
    /// Field re-injected by the reversal check: "exact" or "coherent".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reversal: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawImperfections {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_spread: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom_number: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transit_time: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScan {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset_start: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset_stop: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScaling {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<Value>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub system: RawSystem,
    #[serde(default)]
    pub pump: RawPump,
    #[serde(default)]
    pub field: RawField,
    #[serde(default)]
    pub run: RawRun,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub imperfections: Option<RawImperfections>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<RawScan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling: Option<RawScaling>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub wavelength: f64,
    pub offsets: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingConfig {
    pub n_values: Vec<f64>,
    pub t0: f64,
}

/// Fully validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub spec: ScenarioSpec,
    pub seed: u64,
    pub t_ab: Option<f64>,
    pub reversal: ReversalVariant,
    pub scan: Option<ScanConfig>,
    pub scaling: Option<ScalingConfig>,
    /// Input with every default filled in.
    pub echo: RawConfig,
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn text<'a>(field: &str, v: &'a Value) -> Result<&'a str, CliError> {
    match v {
        Value::Text(t) => Ok(t),
        Value::Number(x) => Err(invalid(field, format!("unit tag missing on {x}"))),
    }
}

fn rate(field: &str, v: &Value) -> Result<f64, CliError> {
    let r = units::rate(text(field, v)?).map_err(|m| invalid(field, m))?;
    if r < 0.0 {
        return Err(invalid(field, format!("must be non-negative, got {r} rad/s")));
    }
    Ok(r)
}

fn time(field: &str, v: &Value) -> Result<f64, CliError> {
    units::time(text(field, v)?).map_err(|m| invalid(field, m))
}

fn positive_time(field: &str, v: &Value) -> Result<f64, CliError> {
    let t = time(field, v)?;
    if !(t > 0.0) {
        return Err(invalid(field, format!("must be positive, got {t} s")));
    }
    Ok(t)
}

fn count(field: &str, v: f64, min: usize) -> Result<usize, CliError> {
    if v.fract() != 0.0 || v < min as f64 || v > 1e9 {
        return Err(invalid(field, format!("must be an integer >= {min}, got {v}")));
    }
    Ok(v as usize)
}

/// Config key for a field name reported by the simulation library.
fn config_key(core_field: &str) -> &str {
    match core_field {
        "n_atoms" => "system.n_atoms",
        "g" => "system.g",
        "gamma_c" => "system.gamma_c",
        "gamma_a" => "system.gamma_a",
        "pulse_area" | "theta" => "pump.theta",
        "phase" => "pump.phi0",
        "duration" => "run.duration",
        "samples" => "run.samples",
        "pump_off_at" => "run.pump_off_at",
        "coupling_spread" => "imperfections.coupling_spread",
        "phase_spread" => "imperfections.phase_spread",
        "mc_samples" => "imperfections.samples",
        "wavelength" => "scan.wavelength",
        "t0" => "scaling.t0",
        other => other,
    }
}

/// Rewrites library validation errors to name the config key.
pub fn rename_field(err: superabsorb::Error) -> CliError {
    match err {
        superabsorb::Error::InvalidParameter { field, reason } => invalid(config_key(field), reason),
        e => CliError::Core(e),
    }
}

fn missing_keys(raw: &RawConfig) -> Vec<String> {
    let present = [
        raw.system.n_atoms.is_some(),
        raw.system.g.is_some(),
        raw.system.gamma_c.is_some(),
        raw.system.gamma_a.is_some(),
        raw.pump.theta.is_some(),
        raw.field.kind.is_some(),
        raw.run.duration.is_some(),
    ];
    REQUIRED_KEYS
        .iter()
        .zip(present)
        .filter(|(_, p)| !p)
        .map(|(k, _)| k.to_string())
        .collect()
}

pub fn parse_toml(source: &str) -> Result<RawConfig, CliError> {
    toml::from_str(source).map_err(|e| CliError::Syntax(e.message().to_string()))
}

/// Validates `raw`; `seed_override` replaces the config seed.
pub fn resolve(raw: &RawConfig, seed_override: Option<u64>) -> Result<Resolved, CliError> {
    let missing = missing_keys(raw);
    if !missing.is_empty() {
        return Err(CliError::MissingKeys(missing));
    }
    let mut echo = raw.clone();
    let seed = seed_override.or(raw.seed).unwrap_or(0);
    echo.seed = Some(seed);

    let sys = &raw.system;
    let n_atoms = sys.n_atoms.expect("checked");
    if !(n_atoms >= 0.0) || !n_atoms.is_finite() {
        return Err(invalid(
            "system.n_atoms",
            format!("must be non-negative, got {n_atoms}"),
        ));
    }
    let mut params = SystemParams::lossless(n_atoms, rate("system.g", sys.g.as_ref().expect("checked"))?);
    params.cavity_rate = rate("system.gamma_c", sys.gamma_c.as_ref().expect("checked"))?;
    params.atomic_rate = rate("system.gamma_a", sys.gamma_a.as_ref().expect("checked"))?;
    params.atomic_decay = sys.atomic_decay.unwrap_or(false);
    echo.system.atomic_decay = Some(params.atomic_decay);
    params.fock_cutoff = match &sys.fock_cutoff {
        None => None,
        Some(Value::Text(t)) if t == "auto" => None,
        Some(Value::Number(x)) => Some(count("system.fock_cutoff", *x, 1)?),
        Some(Value::Text(t)) => {
            return Err(invalid(
                "system.fock_cutoff",
                format!("expected a level count or \"auto\", got {t:?}"),
            ))
        }
    };
    if sys.fock_cutoff.is_none() {
        echo.system.fock_cutoff = Some(Value::Text("auto".into()));
    }

    let theta_value = raw.pump.theta.as_ref().expect("checked");
    let theta = units::angle(text("pump.theta", theta_value)?).map_err(|m| invalid("pump.theta", m))?;
    let phi0 = match &raw.pump.phi0 {
        Some(v) => units::angle(text("pump.phi0", v)?).map_err(|m| invalid("pump.phi0", m))?,
        None => {
            echo.pump.phi0 = Some(Value::Text("0 rad".into()));
            0.0
        }
    };
    let pump = PumpSpec::new(theta, phi0).map_err(rename_field)?;

    let duration = positive_time("run.duration", raw.run.duration.as_ref().expect("checked"))?;
    let samples = match raw.run.samples {
        Some(v) => count("run.samples", v, 1)?,
        None => {
            echo.run.samples = Some(400.0);
            400
        }
    };
    let pump_off_at = raw
        .run
        .pump_off_at
        .as_ref()
        .map(|v| positive_time("run.pump_off_at", v))
        .transpose()?;
    let t_ab = raw
        .run
        .t_ab
        .as_ref()
        .map(|v| positive_time("run.t_ab", v))
        .transpose()?;
    if let Some(t) = t_ab {
        if t > duration {
            return Err(invalid("run.t_ab", "must not exceed run.duration"));
        }
    }

    let reversal = match raw.run.reversal.as_deref().unwrap_or("exact") {
        "exact" => ReversalVariant::Exact,
        "coherent" => ReversalVariant::CoherentApproximation,
        other => {
            return Err(invalid(
                "run.reversal",
                format!("expected exact or coherent, got {other:?}"),
            ))
        }
    };
    echo.run.reversal = Some(raw.run.reversal.clone().unwrap_or_else(|| "exact".into()));

    let f = &raw.field;
    let initial_field = match f.kind.as_deref().expect("checked") {
        "vacuum" => InitialField::Vacuum,
        "coherent" => {
            let re = f
                .alpha_re
                .ok_or_else(|| invalid("field.alpha_re", "required for a coherent field"))?;
            let im = f.alpha_im.unwrap_or(0.0);
            echo.field.alpha_im = Some(im);
            InitialField::Coherent(C64::new(re, im))
        }
        "opposed" => {
            let n0 =
                f.n0.ok_or_else(|| invalid("field.n0", "required for an opposed field"))?;
            if !(n0 > 0.0) || !n0.is_finite() {
                return Err(invalid("field.n0", format!("must be positive, got {n0}")));
            }
            InitialField::Opposed(n0)
        }
        "reversed" => {
            let t0 =
                f.t0.as_ref()
                    .ok_or_else(|| invalid("field.t0", "required for a reversed field"))?;
            let t0 = positive_time("field.t0", t0)?;
            // field emitted by the same atoms without losses, phase flipped
            let mut lossless = params;
            lossless.cavity_rate = 0.0;
            lossless.atomic_decay = false;
            let probe = ScenarioSpec::new(lossless, pump, InitialField::Vacuum, t0);
            let alpha = superradiant_amplitude(&probe, t0).map_err(rename_field)?.alpha;
            InitialField::Coherent(-alpha)
        }
        other => {
            return Err(invalid(
                "field.kind",
                format!("expected vacuum, coherent, opposed or reversed, got {other:?}"),
            ))
        }
    };

    let imperfections = match &raw.imperfections {
        None => None,
        Some(im) => {
            let mut e = im.clone();
            let coupling_spread = im.coupling_spread.unwrap_or(0.0);
            e.coupling_spread = Some(coupling_spread);
            let phase_spread = match &im.phase_spread {
                Some(v) => units::angle(text("imperfections.phase_spread", v)?)
                    .map_err(|m| invalid("imperfections.phase_spread", m))?,
                None => {
                    e.phase_spread = Some(Value::Text("0 rad".into()));
                    0.0
                }
            };
            let atom_number = match im.atom_number.as_deref().unwrap_or("fixed") {
                "fixed" => AtomNumberDistribution::Fixed,
                "poisson" => AtomNumberDistribution::Poisson,
                other => {
                    return Err(invalid(
                        "imperfections.atom_number",
                        format!("expected fixed or poisson, got {other:?}"),
                    ))
                }
            };
            e.atom_number = Some(im.atom_number.clone().unwrap_or_else(|| "fixed".into()));
            let transit_time = match &im.transit_time {
                Some(v) => positive_time("imperfections.transit_time", v)?,
                None => {
                    let default = Value::Text("100 ns".into());
                    let t = time("imperfections.transit_time", &default)?;
                    e.transit_time = Some(default);
                    t
                }
            };
            let mc = count("imperfections.samples", im.samples.unwrap_or(100.0), 1)?;
            e.samples = Some(mc as f64);
            echo.imperfections = Some(e);
            Some(ImperfectionModel {
                coupling_spread,
                phase_spread,
                atom_number,
                transit_time,
                samples: mc,
                seed,
            })
        }
    };

    let spec = ScenarioSpec {
        params,
        pump,
        initial_field,
        duration,
        intervals: samples,
        pump_off_at,
        imperfections,
    };
    spec.validate().map_err(rename_field)?;

    let scan = match &raw.scan {
        None => None,
        Some(s) => {
            let mut e = s.clone();
            let wl = s
                .wavelength
                .as_ref()
                .ok_or_else(|| invalid("scan.wavelength", "required for a scan"))?;
            let wavelength =
                units::length(text("scan.wavelength", wl)?).map_err(|m| invalid("scan.wavelength", m))?;
            if !(wavelength > 0.0) {
                return Err(invalid(
                    "scan.wavelength",
                    format!("must be positive, got {wavelength} m"),
                ));
            }
            let bound = |key: &str, v: &Option<Value>, default: f64| -> Result<(f64, Value), CliError> {
                match v {
                    Some(v) => Ok((
                        units::length(text(key, v)?).map_err(|m| invalid(key, m))?,
                        v.clone(),
                    )),
                    None => Ok((default, Value::Text(format!("{} m", default)))),
                }
            };
            let (start, vs) = bound("scan.offset_start", &s.offset_start, -0.5 * wavelength)?;
            let (stop, ve) = bound("scan.offset_stop", &s.offset_stop, 0.5 * wavelength)?;
            let points = count("scan.points", s.points.unwrap_or(41.0), 1)?;
            e.offset_start = Some(vs);
            e.offset_stop = Some(ve);
            e.points = Some(points as f64);
            echo.scan = Some(e);
            let offsets = if points == 1 {
                vec![start]
            } else {
                (0..points)
                    .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
                    .collect()
            };
            Some(ScanConfig { wavelength, offsets })
        }
    };

    let scaling = match &raw.scaling {
        None => None,
        Some(s) => {
            let mut e = s.clone();
            let t0 =
                s.t0.as_ref()
                    .ok_or_else(|| invalid("scaling.t0", "required for a sweep"))?;
            let t0 = positive_time("scaling.t0", t0)?;
            let n_values = s
                .n_values
                .clone()
                .unwrap_or_else(|| (2..=10).map(f64::from).collect());
            if n_values.is_empty() || n_values.iter().any(|n| !(*n > 0.0) || !n.is_finite()) {
                return Err(invalid(
                    "scaling.n_values",
                    "need a non-empty list of positive atom numbers",
                ));
            }
            e.n_values = Some(n_values.clone());
            echo.scaling = Some(e);
            Some(ScalingConfig { n_values, t0 })
        }
    };

    Ok(Resolved {
        spec,
        seed,
        t_ab,
        reversal,
        scan,
        scaling,
        echo,
    })
}
