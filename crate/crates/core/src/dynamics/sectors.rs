// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Master-equation propagation restricted to low coherence orders.
//!
//! H conserves the excitation number p = n + k and every jump operator
//! lowers it by one, so the block ρ_{p,q} only ever feeds ρ_{p−1,q−1}. The
//! coherence order p − q is therefore conserved by the Liouvillian. All
//! sampled observables live in orders 0 and ±1, so only the blocks ρ_{p,p}
//! and ρ_{p,p−1} are kept. This is exact for those observables and much
//! cheaper than the full density matrix.

use nalgebra::{DMatrix, DVector};

use super::lindblad::{is_positive_within, jump_operators, POSITIVITY_TOL, STIFFNESS_LIMIT};
use super::{check_grid, DissipationSpec, IntegratorSettings, Observables, TimeSeries};
use crate::hilbert::{lowering_element, BasisSpec, OperatorMatrix};
use crate::states::{JointRepr, JointState};
use crate::{Error, Result, C64};

/// Where each joint basis state sits inside its excitation sector.
#[derive(Clone, Debug, PartialEq)]
struct Layout {
    basis: BasisSpec,
    /// Smallest atomic excitation present in sector p.
    k_lo: Vec<usize>,
    sizes: Vec<usize>,
}

impl Layout {
    fn new(basis: BasisSpec) -> Self {
        let (n_atoms, cutoff) = (basis.n_atoms(), basis.fock_cutoff());
        let sectors = n_atoms + cutoff + 1;
        let mut k_lo = Vec::with_capacity(sectors);
        let mut sizes = Vec::with_capacity(sectors);
        for p in 0..sectors {
            let lo = p.saturating_sub(cutoff);
            let hi = p.min(n_atoms);
            k_lo.push(lo);
            sizes.push(hi - lo + 1);
        }
        Self { basis, k_lo, sizes }
    }

    fn sectors(&self) -> usize {
        self.sizes.len()
    }

    /// (sector, position) of a joint index.
    fn locate(&self, index: usize) -> (usize, usize) {
        let (n, k) = self.basis.split_index(index);
        let p = n + k;
        (p, k - self.k_lo[p])
    }

    /// (photons, excited atoms) of position `i` in sector `p`.
    fn label(&self, p: usize, i: usize) -> (usize, usize) {
        let k = self.k_lo[p] + i;
        (p - k, k)
    }

    fn zero_blocks(&self) -> (Vec<DMatrix<C64>>, Vec<DMatrix<C64>>) {
        let diag = self.sizes.iter().map(|&d| DMatrix::zeros(d, d)).collect();
        let off = (0..self.sectors())
            .map(|p| DMatrix::zeros(self.sizes[p], if p == 0 { 0 } else { self.sizes[p - 1] }))
            .collect();
        (diag, off)
    }
}

/// Density matrix restricted to coherence orders 0 and ±1 in the
/// excitation number.
///
/// `diagonal[p]` holds ρ_{p,p} and `lower[p]` holds ρ_{p,p−1}; order −1 is
/// the adjoint of `lower`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorDensity {
    layout: Layout,
    diagonal: Vec<DMatrix<C64>>,
    lower: Vec<DMatrix<C64>>,
}

impl SectorDensity {
    /// Projects a pure or mixed joint state onto orders 0 and ±1.
    pub fn from_joint(state: &JointState) -> Self {
        let layout = Layout::new(*state.basis());
        let (mut diagonal, mut lower) = layout.zero_blocks();
        let dim = layout.basis.joint_dim();
        let place: Vec<(usize, usize)> = (0..dim).map(|i| layout.locate(i)).collect();
        match state.repr() {
            JointRepr::Pure(psi) => {
                let mut parts: Vec<DVector<C64>> = layout.sizes.iter().map(|&d| DVector::zeros(d)).collect();
                for (i, &(p, x)) in place.iter().enumerate() {
                    parts[p][x] = psi[i];
                }
                for p in 0..layout.sectors() {
                    diagonal[p] = &parts[p] * parts[p].adjoint();
                    if p > 0 {
                        lower[p] = &parts[p] * parts[p - 1].adjoint();
                    }
                }
            }
            JointRepr::Density(rho) => {
                for (i, &(p, x)) in place.iter().enumerate() {
                    for (j, &(q, y)) in place.iter().enumerate() {
                        if p == q {
                            diagonal[p][(x, y)] = rho[(i, j)];
                        } else if p == q + 1 {
                            lower[p][(x, y)] = rho[(i, j)];
                        }
                    }
                }
            }
        }
        Self {
            layout,
            diagonal,
            lower,
        }
    }

    /// Fresh ground-state atoms next to a field given by its populations
    /// ρ_f(n, n) and first subdiagonal ρ_f(n, n−1).
    pub fn with_ground_atoms(
        basis: BasisSpec,
        field_populations: &[f64],
        field_subdiagonal: &[C64],
    ) -> Result<Self> {
        let dim = basis.field_dim();
        if field_populations.len() != dim || field_subdiagonal.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: field_populations.len().min(field_subdiagonal.len()),
            });
        }
        let layout = Layout::new(basis);
        let (mut diagonal, mut lower) = layout.zero_blocks();
        for n in 0..dim {
            // |n, k = 0⟩ is the first entry of sector n
            diagonal[n][(0, 0)] = C64::from(field_populations[n]);
            if n > 0 {
                lower[n][(0, 0)] = field_subdiagonal[n];
            }
        }
        Ok(Self {
            layout,
            diagonal,
            lower,
        })
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.layout.basis
    }

    pub fn trace(&self) -> f64 {
        self.diagonal.iter().map(|b| b.trace().re).sum()
    }

    /// Field populations ρ_f(n, n) and subdiagonal ρ_f(n, n−1), atoms traced out.
    pub fn field_band(&self) -> (Vec<f64>, Vec<C64>) {
        let dim = self.layout.basis.field_dim();
        let mut pops = vec![0.0; dim];
        let mut sub = vec![C64::new(0.0, 0.0); dim];
        for p in 0..self.layout.sectors() {
            for x in 0..self.layout.sizes[p] {
                let (n, k) = self.layout.label(p, x);
                pops[n] += self.diagonal[p][(x, x)].re;
                // partner |n−1, k⟩ sits in sector p−1
                if n >= 1 && p >= 1 {
                    let lo = self.layout.k_lo[p - 1];
                    if k >= lo && k - lo < self.layout.sizes[p - 1] {
                        sub[n] += self.lower[p][(x, k - lo)];
                    }
                }
            }
        }
        (pops, sub)
    }

    /// Every ρ_{p,p} block is positive semidefinite within `tol`.
    ///
    /// Each block is a compression of ρ, so this is necessary for ρ ≥ 0.
    pub fn is_positive_within(&self, tol: f64) -> bool {
        self.diagonal.iter().all(|b| is_positive_within(b, tol))
    }

    /// Population of |n_max, k ≥ 1⟩.
    pub fn truncation_leak(&self) -> f64 {
        let cutoff = self.layout.basis.fock_cutoff();
        let mut leak = 0.0;
        for p in cutoff + 1..self.layout.sectors() {
            // n = n_max is the first entry of every sector above the cutoff
            leak += self.diagonal[p][(0, 0)].re;
        }
        leak
    }

    /// Same quantities as [`super::observables`], except `purity`, which
    /// needs the discarded coherence orders and is reported as NaN.
    pub fn observables(&self) -> Observables {
        let layout = &self.layout;
        let n_atoms = layout.basis.n_atoms();
        let cutoff = layout.basis.fock_cutoff();
        let j = layout.basis.spin();
        let mut obs = Observables {
            purity: f64::NAN,
            ..Observables::default()
        };
        for p in 0..layout.sectors() {
            let block = &self.diagonal[p];
            for x in 0..layout.sizes[p] {
                let (n, k) = layout.label(p, x);
                let pop = block[(x, x)].re;
                obs.norm_or_trace += pop;
                obs.mean_n += n as f64 * pop;
                obs.mean_jz += (k as f64 - j) * pop;
                if n + 2 > cutoff {
                    obs.tail += pop;
                }
                if k >= 1 {
                    let l = lowering_element(n_atoms, k);
                    obs.mean_jplus_jminus += l * l * pop;
                    // a†J⁻ maps |n, k⟩ to |n+1, k−1⟩, one slot lower in sector p
                    if n < cutoff {
                        obs.mean_adag_jminus += block[(x, x - 1)] * l * ((n + 1) as f64).sqrt();
                    }
                }
                if p >= 1 {
                    let lo = layout.k_lo[p - 1];
                    let prev = layout.sizes[p - 1];
                    // ⟨a⟩ uses ρ(|n,k⟩, |n−1,k⟩), ⟨J⁻⟩ uses ρ(|n,k⟩, |n,k−1⟩)
                    if n >= 1 && k >= lo && k - lo < prev {
                        obs.mean_a += self.lower[p][(x, k - lo)] * (n as f64).sqrt();
                    }
                    if k > lo && k - 1 - lo < prev {
                        obs.mean_jminus += self.lower[p][(x, k - 1 - lo)] * lowering_element(n_atoms, k);
                    }
                }
            }
        }
        obs
    }

    fn axpy(&self, other: &Self, factor: f64) -> Self {
        let f = C64::from(factor);
        Self {
            layout: self.layout.clone(),
            diagonal: self
                .diagonal
                .iter()
                .zip(&other.diagonal)
                .map(|(a, b)| a + b * f)
                .collect(),
            lower: self
                .lower
                .iter()
                .zip(&other.lower)
                .map(|(a, b)| a + b * f)
                .collect(),
        }
    }

    fn hermitize(&mut self) {
        for b in &mut self.diagonal {
            *b = (&*b + b.adjoint()) * C64::from(0.5);
        }
    }
}

/// Generator blocks: drift G_p = −iH_p − ½K_p and jump blocks L: p → p−1.
struct SectorGenerator {
    drift: Vec<DMatrix<C64>>,
    drift_adj: Vec<DMatrix<C64>>,
    /// jumps[l][p] maps sector p to p−1 (empty for p = 0).
    jumps: Vec<Vec<DMatrix<C64>>>,
    jumps_adj: Vec<Vec<DMatrix<C64>>>,
}

impl SectorGenerator {
    fn new(layout: &Layout, hamiltonian: &OperatorMatrix, jumps: &[OperatorMatrix]) -> Result<Self> {
        let sectors = layout.sectors();
        let mut drift: Vec<DMatrix<C64>> = layout.sizes.iter().map(|&d| DMatrix::zeros(d, d)).collect();
        for (i, j, v) in hamiltonian.triplets() {
            let ((p, x), (q, y)) = (layout.locate(i), layout.locate(j));
            if p != q {
                return Err(Error::InvalidParameter {
                    field: "hamiltonian",
                    reason: "H must conserve the excitation number".into(),
                });
            }
            drift[p][(x, y)] += C64::new(0.0, -1.0) * v;
        }
        let mut jump_blocks = Vec::with_capacity(jumps.len());
        for op in jumps {
            let mut blocks: Vec<DMatrix<C64>> = (0..sectors)
                .map(|p| DMatrix::zeros(if p == 0 { 0 } else { layout.sizes[p - 1] }, layout.sizes[p]))
                .collect();
            for (i, j, v) in op.triplets() {
                let ((p, x), (q, y)) = (layout.locate(i), layout.locate(j));
                if p + 1 != q {
                    return Err(Error::InvalidParameter {
                        field: "dissipation",
                        reason: "jump operators must lower the excitation number by one".into(),
                    });
                }
                blocks[q][(x, y)] += v;
            }
            for p in 1..sectors {
                let k = blocks[p].adjoint() * &blocks[p];
                drift[p] -= k * C64::from(0.5);
            }
            jump_blocks.push(blocks);
        }
        let drift_adj = drift.iter().map(|m| m.adjoint()).collect();
        let jumps_adj = jump_blocks
            .iter()
            .map(|bs| bs.iter().map(|m| m.adjoint()).collect())
            .collect();
        Ok(Self {
            drift,
            drift_adj,
            jumps: jump_blocks,
            jumps_adj,
        })
    }

    /// Largest absolute row sum of −iH_eff.
    fn drift_bound(&self) -> f64 {
        self.drift
            .iter()
            .flat_map(|m| {
                m.row_iter()
                    .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }

    fn rhs(&self, rho: &SectorDensity) -> SectorDensity {
        let sectors = self.drift.len();
        let mut diagonal = Vec::with_capacity(sectors);
        let mut lower = Vec::with_capacity(sectors);
        for p in 0..sectors {
            let d = &rho.diagonal[p];
            let mut dd = &self.drift[p] * d + d * &self.drift_adj[p];
            let e = &rho.lower[p];
            let mut de = if p == 0 {
                DMatrix::zeros(e.nrows(), e.ncols())
            } else {
                &self.drift[p] * e + e * &self.drift_adj[p - 1]
            };
            if p + 1 < sectors {
                for (l, la) in self.jumps.iter().zip(&self.jumps_adj) {
                    dd += &l[p + 1] * &rho.diagonal[p + 1] * &la[p + 1];
                    if p >= 1 {
                        de += &l[p + 1] * &rho.lower[p + 1] * &la[p];
                    }
                }
            }
            diagonal.push(dd);
            lower.push(de);
        }
        SectorDensity {
            layout: rho.layout.clone(),
            diagonal,
            lower,
        }
    }

    fn step(&self, rho: &SectorDensity, dt: f64) -> SectorDensity {
        let k1 = self.rhs(rho);
        let k2 = self.rhs(&rho.axpy(&k1, 0.5 * dt));
        let k3 = self.rhs(&rho.axpy(&k2, 0.5 * dt));
        let k4 = self.rhs(&rho.axpy(&k3, dt));
        rho.axpy(&k1, dt / 6.0)
            .axpy(&k2, dt / 3.0)
            .axpy(&k3, dt / 3.0)
            .axpy(&k4, dt / 6.0)
    }
}

/// Sampled series plus the final order-0/±1 state.
#[derive(Clone, Debug)]
pub struct SectorEvolution {
    pub series: TimeSeries,
    pub final_state: SectorDensity,
}

/// Master-equation evolution of the order-0 and ±1 blocks.
///
/// Same equation, step rule, abort checks and sampled observables as
/// [`super::evolve_lindblad`]; positivity is checked on each ρ_{p,p}
/// block. H must conserve the excitation number.
pub fn evolve_lindblad_sectors(
    state: &SectorDensity,
    hamiltonian: &OperatorMatrix,
    dissipation: &DissipationSpec,
    t_grid: &[f64],
    settings: &IntegratorSettings,
) -> Result<SectorEvolution> {
    let basis = *state.basis();
    hamiltonian.check_basis(&basis)?;
    check_grid(t_grid)?;
    settings.check_guard(dissipation)?;
    let herm = hamiltonian.hermiticity_error();
    if herm > 1e-12 * hamiltonian.max_abs().max(1.0) {
        return Err(Error::NotHermitian(herm));
    }
    let generator = SectorGenerator::new(&state.layout, hamiltonian, &jump_operators(&basis, dissipation)?)?;
    let bound = generator.drift_bound();
    let max_dt = if bound > 0.0 {
        settings.dt.min(STIFFNESS_LIMIT / bound)
    } else {
        settings.dt
    };

    let mut rho = state.clone();
    let mut series = TimeSeries::default();
    let mut now = 0.0;
    for (sample, &t) in t_grid.iter().enumerate() {
        let span = t - now;
        if span > 0.0 {
            let steps = (span / max_dt - 1e-9).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            for _ in 0..steps {
                rho = generator.step(&rho, dt);
            }
            rho.hermitize();
        }
        now = t;

        let leak = rho.truncation_leak();
        if leak > settings.tail_abort_threshold {
            return Err(Error::TailExceeded {
                tail: leak,
                threshold: settings.tail_abort_threshold,
                time: t,
            });
        }
        let check = settings.positivity_every > 0
            && (sample % settings.positivity_every == 0 || sample + 1 == t_grid.len());
        if check && !rho.is_positive_within(POSITIVITY_TOL) {
            return Err(Error::Positivity {
                time: t,
                tolerance: POSITIVITY_TOL,
            });
        }
        series.push(t, &rho.observables());
    }
    Ok(SectorEvolution {
        series,
        final_state: rho,
    })
}
