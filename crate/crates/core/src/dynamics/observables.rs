// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};

use crate::hilbert::{lowering_element, BasisSpec};
use crate::states::{JointRepr, JointState};
use crate::C64;

/// Expectation values of one joint state.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Observables {
    pub mean_n: f64,
    pub mean_jz: f64,
    pub mean_a: C64,
    pub purity: f64,
    /// Population of the two highest Fock levels.
    pub tail: f64,
    pub norm_or_trace: f64,
    pub mean_jminus: C64,
    pub mean_adag_jminus: C64,
    pub mean_jplus_jminus: f64,
}

/// Generic access to ⟨i|ρ|j⟩ for pure and mixed states.
trait Elements {
    fn at(&self, i: usize, j: usize) -> C64;
    fn pop(&self, i: usize) -> f64;
}

struct Pure<'a>(&'a DVector<C64>);
struct Mixed<'a>(&'a DMatrix<C64>);

impl Elements for Pure<'_> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> C64 {
        self.0[i] * self.0[j].conj()
    }
    #[inline]
    fn pop(&self, i: usize) -> f64 {
        self.0[i].norm_sqr()
    }
}

impl Elements for Mixed<'_> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }
    #[inline]
    fn pop(&self, i: usize) -> f64 {
        self.0[(i, i)].re
    }
}

/// ⟨a†a⟩, ⟨J_z⟩, ⟨a⟩, purity, truncation tail and the bookkeeping
/// correlators, evaluated directly from state elements.
pub fn observables(state: &JointState) -> Observables {
    let basis = state.basis();
    let mut obs = match state.repr() {
        JointRepr::Pure(v) => collect(basis, &Pure(v)),
        JointRepr::Density(m) => collect(basis, &Mixed(m)),
    };
    obs.purity = state.purity() / obs.norm_or_trace.powi(2).max(f64::MIN_POSITIVE);
    obs
}

fn collect(basis: &BasisSpec, rho: &impl Elements) -> Observables {
    let n_atoms = basis.n_atoms();
    let cutoff = basis.fock_cutoff();
    let j = basis.spin();
    let mut obs = Observables::default();
    for n in 0..=cutoff {
        for k in 0..=n_atoms {
            let i = basis.joint_index(n, k);
            let p = rho.pop(i);
            obs.norm_or_trace += p;
            obs.mean_n += n as f64 * p;
            obs.mean_jz += (k as f64 - j) * p;
            if n + 2 > cutoff {
                obs.tail += p;
            }
            if k >= 1 {
                let l = lowering_element(n_atoms, k);
                obs.mean_jplus_jminus += l * l * p;
                // tr(ρ J⁻) picks ⟨n,k|ρ|n,k−1⟩
                obs.mean_jminus += rho.at(i, basis.joint_index(n, k - 1)) * l;
                if n < cutoff {
                    obs.mean_adag_jminus +=
                        rho.at(i, basis.joint_index(n + 1, k - 1)) * l * ((n + 1) as f64).sqrt();
                }
            }
            if n >= 1 {
                obs.mean_a += rho.at(i, basis.joint_index(n - 1, k)) * (n as f64).sqrt();
            }
        }
    }
    obs
}

/// Population of |n_max, k ≥ 1⟩: the only states H couples past the cutoff.
pub fn truncation_leak(state: &JointState) -> f64 {
    let basis = state.basis();
    let n = basis.fock_cutoff();
    (1..=basis.n_atoms())
        .map(|k| {
            let i = basis.joint_index(n, k);
            match state.repr() {
                JointRepr::Pure(v) => v[i].norm_sqr(),
                JointRepr::Density(m) => m[(i, i)].re,
            }
        })
        .sum()
}
