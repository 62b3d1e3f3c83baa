// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance gate: one PASS/FAIL line per criterion, tolerances fixed here.
//!
//! Runs without the libtest harness so every verdict is printed even when
//! output capture is on. The process exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::Instant;

use superabsorb::dynamics::{linear_grid, observables, Propagator};
use superabsorb::experiments::{
    absorption_accounting, equivalent_atom_number, find_turning_point, fit_power_law,
    predicted_absorption_time, run_accounting, run_aperture_scan, run_ordinary_absorption, run_reversal,
    run_superabsorption, run_superradiance, scaling_point, scaling_sweep, AbsorptionAccounting,
    AtomNumberDistribution, ImperfectionModel, InitialField, ReversalVariant, ScenarioSpec, SystemParams,
};
use superabsorb::hilbert::{phase_flip_operator, tc_hamiltonian, BasisSpec};
use superabsorb::oracle::compare_with_dicke;
use superabsorb::states::{
    coherent_state, joint_product_state, superposition_atomic_state, FieldState, PumpSpec,
};
use superabsorb::{Result, C64};
use superabsorb_cli::output::Format;
use superabsorb_cli::{execute, Args};

const TWO_PI: f64 = 2.0 * PI;
/// Experimental coupling and half linewidths, rad/s.
const G: f64 = TWO_PI * 256e3;
const GAMMA_C: f64 = TWO_PI * 131e3;
const GAMMA_A: f64 = TWO_PI * 25e3;
const WAVELENGTH: f64 = 791e-9;

// pinned tolerances
const REVERSAL_MAX_N: f64 = 1e-6;
const REVERSAL_MIN_FIDELITY: f64 = 1.0 - 1e-6;
const REVERSAL_BUDGET_S: f64 = 10.0;
const FLIP_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-10;
const JC_TOL: f64 = 1e-8;
const SHORT_TIME_REL: f64 = 0.02;
const SHORT_TIME_FIDELITY: f64 = 0.005;
const TURNING_REL: f64 = 0.05;
const DECAY_TARGET: f64 = 0.958;
const DECAY_TOL: f64 = 0.005;
const LOSSLESS_Q: f64 = 2.0;
const LOSSLESS_Q_TOL: f64 = 0.02;
const LOSSY_Q_RANGE: (f64, f64) = (1.8, 2.0);
const SCALING_BUDGET_S: f64 = 120.0;
const ACCOUNTING_REL: f64 = 1e-3;
const NODE_MAX: f64 = 1e-8;

struct Verdict {
    pass: bool,
    detail: String,
    info: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
            info: Vec::new(),
        }
    }

    fn note(mut self, line: impl Into<String>) -> Self {
        self.info.push(line.into());
        self
    }
}

/// Accounting records gathered across the suite for the identity check.
#[derive(Default)]
struct Books {
    entries: Vec<(String, AbsorptionAccounting)>,
}

impl Books {
    fn add(&mut self, label: impl Into<String>, acc: &AbsorptionAccounting) {
        self.entries.push((label.into(), *acc));
    }
}

fn experimental(atoms: f64) -> SystemParams {
    let mut p = SystemParams::lossless(atoms, G);
    p.cavity_rate = GAMMA_C;
    p.atomic_rate = GAMMA_A;
    p.atomic_decay = true;
    p
}

fn half_pi() -> PumpSpec {
    PumpSpec::half_pi(0.0)
}

fn spec(
    params: SystemParams,
    pump: PumpSpec,
    field: InitialField,
    duration: f64,
    intervals: usize,
) -> ScenarioSpec {
    let mut s = ScenarioSpec::new(params, pump, field, duration);
    s.intervals = intervals;
    s
}

// 1
fn reversal_identity() -> Result<Verdict> {
    let start = Instant::now();
    let mut worst_n = 0.0_f64;
    let mut worst_f = 1.0_f64;
    for n in 1..=8 {
        for gtn in [0.5, 1.5] {
            let t = gtn / (G * n as f64);
            let s = spec(
                SystemParams::lossless(n as f64, G),
                half_pi(),
                InitialField::Vacuum,
                t,
                50,
            );
            let r = run_reversal(&s, t, ReversalVariant::Exact)?;
            worst_n = worst_n.max(r.final_mean_n);
            worst_f = worst_f.min(r.atomic_fidelity);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst_n < REVERSAL_MAX_N && worst_f > REVERSAL_MIN_FIDELITY && secs < REVERSAL_BUDGET_S;
    Ok(Verdict::new(
        pass,
        format!(
            "N=1..8, gtN in {{0.5, 1.5}}: max final <n> {worst_n:.2e} (< {REVERSAL_MAX_N:e}), \
             min fidelity 1-{:.2e} (> 1-1e-6), {secs:.2} s (< {REVERSAL_BUDGET_S} s)",
            1.0 - worst_f
        ),
    ))
}

// 2
fn phase_flip_identity() -> Result<Verdict> {
    let mut worst = 0.0_f64;
    for n in 1..=4 {
        for cutoff in [4, 8, 12] {
            let basis = BasisSpec::new(n, cutoff)?;
            let prop = Propagator::new(&tc_hamiltonian(&basis, G)?)?;
            let r = phase_flip_operator(&basis).to_dense();
            for gt in [0.3, 1.0, 2.7] {
                let t = gt / G;
                let lhs = &r * prop.unitary(t) * r.adjoint();
                let diff = (lhs - prop.unitary(-t))
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                worst = worst.max(diff);
            }
        }
    }
    Ok(Verdict::new(
        worst < FLIP_TOL,
        format!("max |R U(t) R^dag - U(-t)| = {worst:.2e} over N<=4, n_max in {{4,8,12}} (< {FLIP_TOL:e})"),
    ))
}

// 3
fn oracle_equivalence() -> Result<Verdict> {
    let mut worst_n = 0.0_f64;
    let mut worst_jz = 0.0_f64;
    let pumps = [half_pi(), PumpSpec::new(PI, 0.0)?, PumpSpec::new(0.7, 0.4)?];
    for n in 1..=3 {
        let basis = BasisSpec::new(n, 12)?;
        let fields = [
            FieldState::vacuum(&basis),
            coherent_state(C64::from_polar(0.3, 0.4), &basis)?,
        ];
        for pump in &pumps {
            for field in &fields {
                let grid = linear_grid(2.0 / G, 40);
                let dev = compare_with_dicke(n, pump, field, G, &grid)?;
                worst_n = worst_n.max(dev.mean_n);
                worst_jz = worst_jz.max(dev.mean_jz);
            }
        }
    }
    Ok(Verdict::new(
        worst_n < ORACLE_TOL && worst_jz < ORACLE_TOL,
        format!(
            "N<=3, 3 pumps x 2 fields: max dev <n> {worst_n:.2e}, <Jz> {worst_jz:.2e} (< {ORACLE_TOL:e})"
        ),
    ))
}

// 4
fn jaynes_cummings_limit() -> Result<Verdict> {
    let s = spec(
        SystemParams::lossless(1.0, G),
        PumpSpec::new(PI, 0.0)?,
        InitialField::Vacuum,
        6.0 / G,
        300,
    );
    let ts = run_superradiance(&s)?;
    let worst = ts
        .times
        .iter()
        .zip(&ts.mean_n)
        .map(|(t, n)| (n - (G * t).sin().powi(2)).abs())
        .fold(0.0, f64::max);
    Ok(Verdict::new(
        worst < JC_TOL,
        format!("max |<n> - sin^2(gt)| = {worst:.2e} over gt in [0, 6] (< {JC_TOL:e})"),
    ))
}

// 5
fn short_time_law() -> Result<Verdict> {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2usize, 4, 6, 8] {
        let pump = half_pi();
        let atom = superposition_atomic_state(n, &pump)?;
        let basis = BasisSpec::new(n, n + 10)?;
        let psi0 = joint_product_state(&atom, &FieldState::vacuum(&basis))?;
        let prop = Propagator::new(&tc_hamiltonian(psi0.basis(), G)?)?;
        let v0 = psi0.as_pure().expect("pure").clone();
        let step = 0.005 / (G * n as f64);
        let (mut worst, mut last_t) = (0.0_f64, 0.0);
        for k in 1.. {
            let t = k as f64 * step;
            let st = superabsorb::states::JointState::pure(*psi0.basis(), prop.evolve(&v0, t))?;
            if 1.0 - st.atomic_fidelity(&atom)? >= SHORT_TIME_FIDELITY {
                break;
            }
            let formula = (0.5 * n as f64 * G * t).powi(2);
            worst = worst.max((observables(&st).mean_n / formula - 1.0).abs());
            last_t = t;
        }
        pass &= worst <= SHORT_TIME_REL;
        parts.push(format!(
            "N={n}: {:.1}% (gtN<={:.3})",
            100.0 * worst,
            G * last_t * n as f64
        ));
    }
    Ok(Verdict::new(
        pass,
        format!(
            "max |<n>/|rho_eg N g t|^2 - 1| while atomic fidelity change < 0.5%: {} (limit 2%)",
            parts.join(", ")
        ),
    )
    .note(
        "quantum emission is g^2 t^2 <J+J-> = g^2 t^2 N(N+1)/4, a factor (N+1)/N above the macro-dipole law",
    ))
}

// 6
fn absorption_time() -> Result<Verdict> {
    let mut pass = true;
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for n in [4usize, 6, 8] {
        let cap = (n as f64 / 4.0).powi(2);
        for n0 in [0.25, 0.5 * cap, cap] {
            if n0 < 0.25 {
                continue;
            }
            let t0 = n0.sqrt() / (0.5 * n as f64 * G);
            let s = spec(
                SystemParams::lossless(n as f64, G),
                half_pi(),
                InitialField::Opposed(n0),
                2.0 * t0,
                800,
            );
            let tp = find_turning_point(&run_superabsorption(&s)?)?;
            let rel = (tp.time / t0 - 1.0).abs();
            worst = worst.max(rel);
            pass &= rel <= TURNING_REL;
            parts.push(format!("N={n},n0={n0}: {:.3}", tp.time / t0));
        }
    }
    Ok(Verdict::new(
        pass,
        format!("turning time / predicted t0: {} (max dev {:.1}%, limit 5%)", parts.join(", "), 100.0 * worst),
    )
    .note("every turning point comes early; at small n0 the ratio approaches N/(N+1), the inverse of the emission excess"))
}

// 7
fn decay_convention() -> Result<Verdict> {
    let mut p = SystemParams::lossless(1.0, 0.0);
    p.cavity_rate = GAMMA_C;
    let duration = 1.92e-6;
    let s = spec(
        p,
        PumpSpec::ground(),
        InitialField::Coherent(C64::new(1.5, 0.0)),
        duration,
        200,
    );
    let ts = run_ordinary_absorption(&s)?;
    let reduction = 1.0 - ts.mean_n[ts.len() - 1] / ts.mean_n[0];
    Ok(Verdict::new(
        (reduction - DECAY_TARGET).abs() <= DECAY_TOL,
        format!(
            "gamma_c = 2pi*131 kHz over 1.92 us: reduction {:.2}% (target 95.8% +- 0.5%)",
            100.0 * reduction
        ),
    ))
}

// 8
fn scaling() -> Result<Verdict> {
    let start = Instant::now();
    let atoms: Vec<f64> = (2..=10).map(f64::from).collect();
    let t0 = 0.1 / G;
    let run = |params: SystemParams| -> Result<f64> {
        let base = spec(params, half_pi(), InitialField::Opposed(1.0), 1.5 * t0, 400);
        let sweep = scaling_sweep(&base, &atoms, t0)?;
        let pts: Vec<(f64, f64)> = sweep.iter().map(|p| (p.atoms, p.n_absorbed)).collect();
        Ok(fit_power_law(&pts)?.exponent)
    };
    let q_lossless = run(SystemParams::lossless(2.0, G))?;
    let q_lossy = run(experimental(2.0))?;
    let secs = start.elapsed().as_secs_f64();
    let lossless_ok = (q_lossless - LOSSLESS_Q).abs() <= LOSSLESS_Q_TOL;
    let lossy_ok = (LOSSY_Q_RANGE.0..=LOSSY_Q_RANGE.1).contains(&q_lossy);
    let mut v = Verdict::new(
        lossless_ok && lossy_ok && secs < SCALING_BUDGET_S,
        format!(
            "N=2..10 at t0 = {:.1} ns: lossless q = {q_lossless:.3} (2.00 +- 0.02) {}, experimental rates q = {q_lossy:.3} \
             (in [1.8, 2.0]) {}, {secs:.1} s (< 120 s)",
            t0 * 1e9,
            if lossless_ok { "ok" } else { "out" },
            if lossy_ok { "ok" } else { "out" },
        ),
    )
    .note("measured q = 1.86 +- 0.03; lossless n_absorbed follows <J+J-> ~ N(N+1), whose log-slope over 2..10 is about 1.8");
    // the experiment's own t0 for reference
    match scaling_point(
        &spec(
            experimental(5.0),
            half_pi(),
            InitialField::Opposed(1.0),
            420e-9,
            420,
        ),
        5.0,
        280e-9,
    ) {
        Ok(p) => {
            v = v.note(format!(
                "t0 = 280 ns, experimental rates, N=5: n0 = {:.3}",
                p.photons
            ))
        }
        Err(e) => v = v.note(format!("t0 = 280 ns, experimental rates, N=5: {e}")),
    }
    Ok(v)
}

// 9
fn dominance(books: &mut Books) -> Result<Verdict> {
    let mut fails = Vec::new();
    let mut table = Vec::new();
    let mut tau_fails = 0;
    for n in [2.0, 4.0, 6.0, 8.0] {
        for n0 in [1.0, 2.0, 4.0] {
            let mut sup = spec(experimental(n), half_pi(), InitialField::Opposed(n0), 1.0, 400);
            let t0 = predicted_absorption_time(&sup)?;
            sup.duration = t0.max(100e-9);
            let ord = ScenarioSpec {
                pump: PumpSpec::ground(),
                ..sup.clone()
            };
            let s_series = run_superabsorption(&sup)?;
            let o_series = run_ordinary_absorption(&ord)?;
            for (label, t_ab) in [("t0/4", 0.25 * t0), ("t0/2", 0.5 * t0), ("t0", t0)] {
                let a = absorption_accounting(&s_series, t_ab, &sup, None)?;
                let b = absorption_accounting(&o_series, t_ab, &ord, None)?;
                books.add(format!("superabsorption N={n} n0={n0} t_ab={label}"), &a);
                books.add(format!("ordinary N={n} n0={n0} t_ab={label}"), &b);
                if a.ratio <= b.ratio {
                    fails.push(format!("N={n},n0={n0},{label}: {:.3}<={:.3}", a.ratio, b.ratio));
                }
            }
            let a = absorption_accounting(&s_series, 100e-9, &sup, None)?;
            let b = absorption_accounting(&o_series, 100e-9, &ord, None)?;
            books.add(format!("superabsorption N={n} n0={n0} t_ab=100ns"), &a);
            books.add(format!("ordinary N={n} n0={n0} t_ab=100ns"), &b);
            if a.ratio <= b.ratio {
                tau_fails += 1;
            }
            table.push(format!("N={n},n0={n0}: t0={:.0} ns", t0 * 1e9));
        }
    }
    let mut v = Verdict::new(
        fails.is_empty(),
        format!(
            "ratio(super) > ratio(ordinary) on N in {{2,4,6,8}} x n0 in {{1,2,4}} at t_ab in {{t0/4, t0/2, t0}}: \
             {} of 36 violated{}",
            fails.len(),
            if fails.is_empty() { String::new() } else { format!(" [{}]", fails.join("; ")) }
        ),
    )
    .note(format!("at t_ab = 100 ns: {tau_fails} of 12 violated"));

    // the experiment's operating point, reported without gating
    let n0 = 2.34;
    let sup = spec(experimental(6.8), half_pi(), InitialField::Opposed(n0), 1.0, 400);
    let t0 = predicted_absorption_time(&sup)?;
    let sup = ScenarioSpec { duration: t0, ..sup };
    let ord = ScenarioSpec {
        pump: PumpSpec::ground(),
        ..sup.clone()
    };
    let a = run_accounting(&sup, t0)?;
    let b = run_accounting(&ord, t0)?;
    books.add("superabsorption <N>=6.8", &a);
    books.add("ordinary <N>=6.8", &b);
    let equivalent = equivalent_atom_number(a.ratio, &ord, t0)?;
    v = v
        .note(format!(
            "<N>=6.8, n0=2.34, t_ab=t0={:.1} ns: superabsorption {:.1}%, ordinary {:.1}% (measured 75% / 37%)",
            t0 * 1e9,
            100.0 * a.ratio,
            100.0 * b.ratio
        ))
        .note(format!(
            "ordinary-absorption atoms matching the superabsorption ratio: {equivalent:.3} = {:.3} x 6.8 (measured 3.4x)",
            equivalent / 6.8
        ));
    Ok(v)
}

// 10
fn accounting(books: &mut Books) -> Result<Verdict> {
    // scenarios not covered by the dominance grid
    let mut off = spec(
        experimental(6.8),
        half_pi(),
        InitialField::Opposed(2.34),
        500e-9,
        500,
    );
    off.pump_off_at = Some(150e-9);
    books.add("pump-off <N>=6.8", &run_accounting(&off, 500e-9)?);
    let mut mc = spec(
        experimental(2.7),
        half_pi(),
        InitialField::Opposed(1.0),
        200e-9,
        200,
    );
    mc.imperfections = Some(ImperfectionModel {
        coupling_spread: 0.2,
        phase_spread: 0.3,
        atom_number: AtomNumberDistribution::Poisson,
        transit_time: 100e-9,
        samples: 16,
        seed: 7,
    });
    books.add(
        "superabsorption Monte Carlo <N>=2.7",
        &run_accounting(&mc, 200e-9)?,
    );
    let lossless = spec(
        SystemParams::lossless(4.0, G),
        half_pi(),
        InitialField::Opposed(1.0),
        1.0,
        400,
    );
    let t0 = predicted_absorption_time(&lossless)?;
    let lossless = ScenarioSpec {
        duration: t0,
        ..lossless
    };
    books.add("superabsorption lossless N=4", &run_accounting(&lossless, t0)?);

    let (worst_label, worst) = books
        .entries
        .iter()
        .map(|(l, a)| (l.as_str(), a.residual().abs() / a.n_initial))
        .fold(("", 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(Verdict::new(
        worst <= ACCOUNTING_REL,
        format!(
            "{} scenarios, max |n_initial - (n_remaining + n_decayed + n_absorbed - n_spont)| / n_initial = {worst:.2e} \
             ({worst_label}; limit 1e-3)",
            books.entries.len()
        ),
    ))
}

// 11
fn aperture_scan() -> Result<Verdict> {
    let s = spec(experimental(2.7), half_pi(), InitialField::Vacuum, 100e-9, 100);
    let scan = run_aperture_scan(&s, &[0.0, 0.25 * WAVELENGTH], WAVELENGTH)?;
    let node = [scan.superposition[1], scan.excited[1]].map(|x| x * scan.reference);
    let above = scan.superposition[0] > scan.excited[0];
    let vanish = node.iter().all(|x| *x < NODE_MAX);
    Ok(Verdict::new(
        above && vanish,
        format!(
            "<N>=2.7, 100 ns, dz=0: normalized <n>(pi/2) = {:.3} vs <n>(pi) = {:.3} {}; dz=lambda/4: {:.1e}, {:.1e} \
             (< 1e-8)",
            scan.superposition[0],
            scan.excited[0],
            if above { "ok" } else { "not above" },
            node[0],
            node[1]
        ),
    )
    .note("deterministic <N> uses 3 atoms with g scaled by sqrt(2.7/3); at N=3, <J+J-> ties between the two pumps")
    .note(format!("exact average over N ~ Poisson(2.7) at dz=0: <n>(pi/2) / <n>(pi) = {:.3}", poisson_ratio(&s)?)))
}

/// Ratio of the pumped to the fully excited photon number averaged over Poisson N.
fn poisson_ratio(base: &ScenarioSpec) -> Result<f64> {
    let mean = base.params.mean_atoms;
    let (mut num, mut den) = (0.0, 0.0);
    let mut weight = (-mean).exp();
    for k in 1..=14 {
        weight *= mean / k as f64;
        let mut params = base.params;
        params.mean_atoms = k as f64;
        let scan = run_aperture_scan(&base.with_params(params), &[0.0], WAVELENGTH)?;
        num += weight * scan.superposition[0] * scan.reference;
        den += weight * scan.excited[0] * scan.reference;
    }
    Ok(num / den)
}

// 12
fn determinism() -> Result<Verdict> {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = dir.path().join("run.cfg");
    fs::write(
        &config,
        r#"
seed = 2026
[system]
n_atoms = 2.7
g = "2pi*256 kHz"
gamma_c = "2pi*131 kHz"
gamma_a = "2pi*25 kHz"
atomic_decay = true
[pump]
theta = "pi/2"
[field]
kind = "opposed"
n0 = 1.5
[run]
duration = "200 ns"
samples = 100
[imperfections]
coupling_spread = 0.2
phase_spread = "0.3 rad"
atom_number = "poisson"
samples = 8
"#,
    )
    .expect("write config");
    let mut compared = 0;
    let mut differing = Vec::new();
    for format in [Format::Csv, Format::Json] {
        let outs: Vec<_> = ["a", "b"]
            .iter()
            .map(|n| dir.path().join(format!("{n}{format:?}")))
            .collect();
        for out in &outs {
            let args = Args {
                scenario: superabsorb_cli::scenarios::Scenario::Superabsorb,
                config: config.clone(),
                out: out.clone(),
                seed: None,
                format,
            };
            if let Err(e) = execute(&args) {
                return Ok(Verdict::new(false, format!("run failed: {e}")));
            }
        }
        for name in listing(&outs[0]) {
            if name == "wall_time.json" {
                continue;
            }
            compared += 1;
            if fs::read(outs[0].join(&name)).ok() != fs::read(outs[1].join(&name)).ok() {
                differing.push(name);
            }
        }
    }
    Ok(Verdict::new(
        differing.is_empty() && compared == 4,
        format!(
            "seeded Monte Carlo run twice, csv and json: {compared} files compared, {} differ",
            differing.len()
        ),
    )
    .note("wall_time.json is the only file excluded"))
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok()?.file_name().into_string().ok())
                .collect()
        })
        .unwrap_or_default();
    names.sort();
    names
}

fn main() {
    let mut books = Books::default();
    let mut results: Vec<(u32, &str, Result<Verdict>, f64)> = Vec::new();
    let mut record = |id, title, f: &mut dyn FnMut() -> Result<Verdict>| {
        let start = Instant::now();
        let v = f();
        results.push((id, title, v, start.elapsed().as_secs_f64()));
        let (id, title, v, secs) = results.last().expect("just pushed");
        print_verdict(*id, title, v, *secs);
    };
    record(1, "time-reversal identity", &mut reversal_identity);
    record(2, "phase-flip conjugation", &mut phase_flip_identity);
    record(3, "oracle equivalence", &mut oracle_equivalence);
    record(4, "Jaynes-Cummings limit", &mut jaynes_cummings_limit);
    record(5, "short-time law", &mut short_time_law);
    record(6, "complete-absorption time", &mut absorption_time);
    record(7, "decay convention", &mut decay_convention);
    record(8, "N^2 scaling", &mut scaling);
    record(9, "dominance", &mut || dominance(&mut books));
    record(10, "accounting identity", &mut || accounting(&mut books));
    record(11, "aperture scan", &mut aperture_scan);
    record(12, "determinism", &mut determinism);

    let failed: Vec<u32> = results
        .iter()
        .filter(|(_, _, v, _)| !matches!(v, Ok(v) if v.pass))
        .map(|(id, ..)| *id)
        .collect();
    println!(
        "acceptance: {} of {} criteria pass{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failing: {failed:?}")
        }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

fn print_verdict(id: u32, title: &str, v: &Result<Verdict>, secs: f64) {
    match v {
        Ok(v) => {
            let tag = if v.pass { "PASS" } else { "FAIL" };
            println!("criterion {id:>2} {tag} {title}: {} [{secs:.1} s]", v.detail);
            for line in &v.info {
                println!("               info: {line}");
            }
        }
        Err(e) => println!("criterion {id:>2} FAIL {title}: error: {e} [{secs:.1} s]"),
    }
}
