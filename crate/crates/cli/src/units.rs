// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Unit-tagged quantities in config files.
//!
//! Every physical value carries its unit in the string. Rates are angular
//! frequencies, written either as `2pi*<f> <Hz|kHz|MHz>` or `<w> rad/s`.

use std::f64::consts::{PI, TAU};

fn number(text: &str) -> Option<f64> {
    let v: f64 = text.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Splits `"<number> <unit>"` at the last space.
fn split_unit(text: &str) -> Option<(f64, &str)> {
    let (value, unit) = text.trim().rsplit_once(' ')?;
    Some((number(value)?, unit.trim()))
}

/// Angular frequency in rad/s.
pub fn rate(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let cyclic = t.strip_prefix("2pi*").or_else(|| t.strip_prefix("2π*"));
    let Some((value, unit)) = split_unit(cyclic.unwrap_or(t)) else {
        return Err(format!(
            "expected \"2pi*<value> kHz\" or \"<value> rad/s\", got {text:?}"
        ));
    };
    match (cyclic.is_some(), unit) {
        (true, "Hz") => Ok(TAU * value),
        (true, "kHz") => Ok(TAU * value * 1e3),
        (true, "MHz") => Ok(TAU * value * 1e6),
        (false, "rad/s") => Ok(value),
        (false, "Hz" | "kHz" | "MHz") => Err(format!(
            "cyclic frequency {text:?} needs the 2pi* prefix to be read as an angular rate"
        )),
        _ => Err(format!("unknown rate unit {unit:?} in {text:?}")),
    }
}

/// Time in seconds.
pub fn time(text: &str) -> Result<f64, String> {
    let Some((value, unit)) = split_unit(text) else {
        return Err(format!("expected \"<value> ns|us|ms|s\", got {text:?}"));
    };
    let scale = match unit {
        "s" => 1.0,
        "ms" => 1e-3,
        "us" | "µs" => 1e-6,
        "ns" => 1e-9,
        "ps" => 1e-12,
        _ => return Err(format!("unknown time unit {unit:?} in {text:?}")),
    };
    Ok(value * scale)
}

/// Length in meters.
pub fn length(text: &str) -> Result<f64, String> {
    let Some((value, unit)) = split_unit(text) else {
        return Err(format!("expected \"<value> nm|um|mm|m\", got {text:?}"));
    };
    let scale = match unit {
        "m" => 1.0,
        "mm" => 1e-3,
        "um" | "µm" => 1e-6,
        "nm" => 1e-9,
        _ => return Err(format!("unknown length unit {unit:?} in {text:?}")),
    };
    Ok(value * scale)
}

/// Angle in radians: `<x> rad`, `<x> deg`, `pi`, `pi/<x>` or `<x>*pi`.
pub fn angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    if t == "pi" {
        return Ok(PI);
    }
    if let Some(d) = t.strip_prefix("pi/") {
        return number(d)
            .filter(|d| *d != 0.0)
            .map(|d| PI / d)
            .ok_or_else(|| bad_angle(text));
    }
    if let Some(m) = t.strip_suffix("*pi") {
        return number(m).map(|m| m * PI).ok_or_else(|| bad_angle(text));
    }
    match split_unit(t) {
        Some((v, "rad")) => Ok(v),
        Some((v, "deg")) => Ok(v.to_radians()),
        _ => Err(bad_angle(text)),
    }
}

fn bad_angle(text: &str) -> String {
    format!("expected \"<value> rad\", \"<value> deg\", \"pi/<n>\" or \"<x>*pi\", got {text:?}")
}
