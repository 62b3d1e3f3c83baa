// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Brute-force references on the full 2^N atomic product space.
//!
//! Nothing here goes through the Dicke ladder: every atom carries its own
//! σ⁻, the Hamiltonian is g Σ_i (a†σ_i⁻ + a σ_i⁺) built entry by entry, and
//! propagation uses one dense eigendecomposition. Used only to validate the
//! symmetric-sector code paths.
//!
//! Product basis index: `n * 2^N + bits`, where bit i set means atom i is
//! excited.

use nalgebra::{DMatrix, DVector};

use crate::dynamics::{
    check_grid, evolve_unitary, DissipationSpec, IntegratorSettings, Observables, TimeSeries,
};
use crate::hilbert::{tc_hamiltonian, BasisSpec};
use crate::states::{joint_product_state, superposition_atomic_state, FieldState, PumpSpec};
use crate::{Error, Result, C64};

pub const MAX_ATOMS: usize = 3;
pub const MAX_CUTOFF: usize = 12;

fn check_size(n_atoms: usize, cutoff: usize) -> Result<()> {
    if n_atoms == 0 || n_atoms > MAX_ATOMS || cutoff > MAX_CUTOFF {
        return Err(Error::OracleTooLarge {
            atoms: n_atoms,
            cutoff,
        });
    }
    Ok(())
}

/// State over 2^N atomic configurations ⊗ Fock levels 0..=n_max.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductBasisState {
    n_atoms: usize,
    fock_cutoff: usize,
    amplitudes: DVector<C64>,
}

impl ProductBasisState {
    pub fn new(n_atoms: usize, fock_cutoff: usize, amplitudes: DVector<C64>) -> Result<Self> {
        check_size(n_atoms, fock_cutoff)?;
        let dim = (1 << n_atoms) * (fock_cutoff + 1);
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                field: "amplitudes",
                reason: format!("product state norm {norm} differs from 1"),
            });
        }
        Ok(Self {
            n_atoms,
            fock_cutoff,
            amplitudes,
        })
    }

    /// ⊗_i (c_g,i |g⟩ + c_e,i |e⟩) ⊗ field, each atom given as (c_g, c_e).
    pub fn from_atoms(atoms: &[(C64, C64)], field: &FieldState) -> Result<Self> {
        let n_atoms = atoms.len();
        let cutoff = field.fock_cutoff();
        check_size(n_atoms, cutoff)?;
        let configs = 1usize << n_atoms;
        let mut atomic = vec![C64::new(1.0, 0.0); configs];
        for (bits, amp) in atomic.iter_mut().enumerate() {
            for (i, &(cg, ce)) in atoms.iter().enumerate() {
                *amp *= if bits >> i & 1 == 1 { ce } else { cg };
            }
        }
        let f = field.amplitudes();
        let amplitudes = DVector::from_fn(configs * (cutoff + 1), |idx, _| {
            f[idx / configs] * atomic[idx % configs]
        });
        let norm = amplitudes.norm();
        Self::new(n_atoms, cutoff, amplitudes.unscale(norm))
    }

    /// Every atom rotated by the same pump pulse.
    pub fn pumped(n_atoms: usize, pump: &PumpSpec, field: &FieldState) -> Result<Self> {
        let (s, c) = (pump.pulse_area() / 2.0).sin_cos();
        let atom = (C64::from(c), C64::from_polar(s, -pump.phase()));
        Self::from_atoms(&vec![atom; n_atoms], field)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// Field phase flip (−1)^n.
    pub fn phase_flipped(&self) -> Self {
        let configs = 1 << self.n_atoms;
        let mut out = self.clone();
        for (idx, v) in out.amplitudes.iter_mut().enumerate() {
            if (idx / configs) % 2 == 1 {
                *v = -*v;
            }
        }
        out
    }

    /// Weight inside the exchange-symmetric subspace: Σ_{n,k} |⟨n, D_k|ψ⟩|².
    pub fn symmetric_weight(&self) -> f64 {
        let configs = 1usize << self.n_atoms;
        let mut weight = 0.0;
        for n in 0..=self.fock_cutoff {
            for k in 0..=self.n_atoms {
                let members: Vec<usize> = (0..configs).filter(|b| b.count_ones() as usize == k).collect();
                let overlap: C64 = members
                    .iter()
                    .map(|&b| self.amplitudes[n * configs + b])
                    .sum::<C64>()
                    / (members.len() as f64).sqrt();
                weight += overlap.norm_sqr();
            }
        }
        weight
    }

    fn observables(&self, ops: &Operators) -> Observables {
        let psi = &self.amplitudes;
        let expect = |m: &DMatrix<C64>| psi.dotc(&(m * psi));
        let configs = 1usize << self.n_atoms;
        let mut obs = Observables {
            purity: 1.0,
            norm_or_trace: psi.norm_squared(),
            mean_a: expect(&ops.annihilator),
            mean_jminus: expect(&ops.lowering),
            mean_adag_jminus: expect(&(ops.annihilator.adjoint() * &ops.lowering)),
            mean_jplus_jminus: expect(&(ops.lowering.adjoint() * &ops.lowering)).re,
            ..Observables::default()
        };
        for (idx, v) in psi.iter().enumerate() {
            let (n, bits) = (idx / configs, idx % configs);
            let p = v.norm_sqr();
            obs.mean_n += n as f64 * p;
            obs.mean_jz += (bits.count_ones() as f64 - self.n_atoms as f64 / 2.0) * p;
            if n + 2 > self.fock_cutoff {
                obs.tail += p;
            }
        }
        obs
    }
}

struct Operators {
    annihilator: DMatrix<C64>,
    /// Σ_i σ_i⁻
    lowering: DMatrix<C64>,
}

impl Operators {
    fn new(n_atoms: usize, cutoff: usize) -> Self {
        let configs = 1usize << n_atoms;
        let dim = configs * (cutoff + 1);
        let mut annihilator = DMatrix::zeros(dim, dim);
        let mut lowering = DMatrix::zeros(dim, dim);
        for n in 0..=cutoff {
            for bits in 0..configs {
                let col = n * configs + bits;
                if n >= 1 {
                    annihilator[((n - 1) * configs + bits, col)] = C64::from((n as f64).sqrt());
                }
                for i in 0..n_atoms {
                    if bits >> i & 1 == 1 {
                        lowering[(n * configs + (bits & !(1 << i)), col)] = C64::from(1.0);
                    }
                }
            }
        }
        Self {
            annihilator,
            lowering,
        }
    }
}

/// g Σ_i (a†σ_i⁻ + a σ_i⁺) on the product space.
pub fn brute_force_hamiltonian(n_atoms: usize, fock_cutoff: usize, coupling: f64) -> Result<DMatrix<C64>> {
    check_size(n_atoms, fock_cutoff)?;
    let ops = Operators::new(n_atoms, fock_cutoff);
    let forward = ops.annihilator.adjoint() * &ops.lowering;
    Ok((&forward + forward.adjoint()) * C64::from(coupling))
}

/// Exact evolution of a product-space state, sampled on `t_grid`.
pub fn brute_force_evolve_state(
    state: &ProductBasisState,
    coupling: f64,
    t_grid: &[f64],
) -> Result<(TimeSeries, ProductBasisState)> {
    check_grid(t_grid)?;
    let (n_atoms, cutoff) = (state.n_atoms, state.fock_cutoff);
    let h = brute_force_hamiltonian(n_atoms, cutoff, coupling)?;
    let ops = Operators::new(n_atoms, cutoff);
    let eig = h.symmetric_eigen();
    let coeffs = eig.eigenvectors.adjoint() * &state.amplitudes;
    let mut series = TimeSeries::default();
    let mut current = state.clone();
    for &t in t_grid {
        let phased = DVector::from_fn(coeffs.len(), |i, _| {
            coeffs[i] * C64::from_polar(1.0, -eig.eigenvalues[i] * t)
        });
        current.amplitudes = &eig.eigenvectors * phased;
        series.push(t, &current.observables(&ops));
    }
    Ok((series, current))
}

/// Pumped atoms next to `field`, evolved on the full product space.
pub fn brute_force_evolve(
    n_atoms: usize,
    pump: &PumpSpec,
    field: &FieldState,
    coupling: f64,
    t_grid: &[f64],
) -> Result<TimeSeries> {
    let state = ProductBasisState::pumped(n_atoms, pump, field)?;
    Ok(brute_force_evolve_state(&state, coupling, t_grid)?.0)
}

/// Largest deviation between the Dicke-sector and product-space paths.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OracleComparison {
    pub mean_n: f64,
    pub mean_jz: f64,
    pub mean_a: f64,
}

impl OracleComparison {
    pub fn max(&self) -> f64 {
        self.mean_n.max(self.mean_jz).max(self.mean_a)
    }
}

/// Evolves pumped atoms next to `field` both ways and compares every sample.
pub fn compare_with_dicke(
    n_atoms: usize,
    pump: &PumpSpec,
    field: &FieldState,
    coupling: f64,
    t_grid: &[f64],
) -> Result<OracleComparison> {
    let oracle = brute_force_evolve(n_atoms, pump, field, coupling, t_grid)?;
    let basis = BasisSpec::new(n_atoms, field.fock_cutoff())?;
    let atom = superposition_atomic_state(n_atoms, pump)?;
    let state = joint_product_state(&atom, field)?;
    let h = tc_hamiltonian(&basis, coupling)?;
    let mut settings = IntegratorSettings::guarded(coupling * n_atoms as f64, &DissipationSpec::lossless());
    // the comparison is exact on the truncated space, whatever reaches the top level
    settings.tail_abort_threshold = f64::INFINITY;
    let dicke = evolve_unitary(&state, &h, t_grid, &settings)?.series;
    let mut out = OracleComparison::default();
    for i in 0..t_grid.len() {
        out.mean_n = out.mean_n.max((oracle.mean_n[i] - dicke.mean_n[i]).abs());
        out.mean_jz = out.mean_jz.max((oracle.mean_jz[i] - dicke.mean_jz[i]).abs());
        out.mean_a = out.mean_a.max((oracle.mean_a[i] - dicke.mean_a[i]).norm());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JcInitial {
    ExcitedVacuum,
    GroundOnePhoton,
}

/// ⟨n(t)⟩ for one atom in the single-excitation Jaynes-Cummings manifold.
pub fn jaynes_cummings_reference(coupling: f64, t: f64, initial: JcInitial) -> f64 {
    let s = (coupling * t).sin().powi(2);
    match initial {
        JcInitial::ExcitedVacuum => s,
        JcInitial::GroundOnePhoton => 1.0 - s,
    }
}

/// |⟨product|Σ_k c_k D_k⟩|² for the given Dicke amplitudes c_k.
pub fn dicke_overlap(n_atoms: usize, pump: &PumpSpec, dicke: &[C64]) -> Result<f64> {
    check_size(n_atoms, 0)?;
    if dicke.len() != n_atoms + 1 {
        return Err(Error::DimensionMismatch {
            expected: n_atoms + 1,
            got: dicke.len(),
        });
    }
    let (s, c) = (pump.pulse_area() / 2.0).sin_cos();
    let excited = C64::from_polar(s, -pump.phase());
    let configs = 1usize << n_atoms;
    let mut overlap = C64::new(0.0, 0.0);
    let mut norm = 0.0;
    for bits in 0..configs {
        let k = bits.count_ones() as usize;
        let product = excited.powu(k as u32) * c.powi((n_atoms - k) as i32);
        let members = (0..configs).filter(|b| b.count_ones() as usize == k).count();
        let embedded = dicke[k] / (members as f64).sqrt();
        overlap += product.conj() * embedded;
        norm += embedded.norm_sqr();
    }
    Ok(overlap.norm_sqr() / norm)
}

/// Overlap of the symmetric product state with the Dicke-ladder state built
/// by [`crate::states::superposition_atomic_state`].
pub fn dicke_embedding_check(n_atoms: usize, pump: &PumpSpec) -> Result<f64> {
    check_size(n_atoms, 0)?;
    let atom = crate::states::superposition_atomic_state(n_atoms, pump)?;
    dicke_overlap(n_atoms, pump, atom.amplitudes().as_slice())
}
