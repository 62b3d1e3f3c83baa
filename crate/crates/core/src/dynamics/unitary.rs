// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};

use super::{check_grid, observables, truncation_leak, Evolution, IntegratorSettings, Method, TimeSeries};
use crate::hilbert::{BasisTag, OperatorMatrix};
use crate::states::{JointRepr, JointState};
use crate::{Error, Result, C64};

const HERMITIAN_TOL: f64 = 1e-12;

/// One invariant subspace of H with its eigendecomposition.
#[derive(Clone, Debug)]
struct Block {
    indices: Vec<usize>,
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
}

/// exp(−iHt) from a one-time eigendecomposition of a Hermitian H.
///
/// H is split into the connected components of its sparsity graph first
/// (the excitation-number sectors for the Tavis-Cummings Hamiltonian), and
/// each block is diagonalized separately.
#[derive(Clone, Debug)]
pub struct Propagator {
    dim: usize,
    blocks: Vec<Block>,
}

impl Propagator {
    pub fn new(hamiltonian: &OperatorMatrix) -> Result<Self> {
        if hamiltonian.tag() != BasisTag::Joint {
            return Err(Error::BasisTag("Hamiltonian must act on the joint space".into()));
        }
        let scale = hamiltonian.max_abs().max(1.0);
        let herm = hamiltonian.hermiticity_error();
        if herm > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(herm));
        }
        let dim = hamiltonian.dim();
        let entries = hamiltonian.triplets();

        let mut parent: Vec<usize> = (0..dim).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(i, j, _) in &entries {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); dim];
        for i in 0..dim {
            let r = find(&mut parent, i);
            members[r].push(i);
        }
        let mut position = vec![0usize; dim];
        let mut blocks = Vec::new();
        for indices in members.into_iter().filter(|m| !m.is_empty()) {
            for (p, &i) in indices.iter().enumerate() {
                position[i] = p;
            }
            let size = indices.len();
            let mut sub = DMatrix::<C64>::zeros(size, size);
            let root = find(&mut parent, indices[0]);
            for &(i, j, v) in &entries {
                if find(&mut parent, i) == root {
                    sub[(position[i], position[j])] += v;
                }
            }
            // exact Hermitian symmetrization guards the eigensolver
            let sub = (&sub + sub.adjoint()).scale(0.5);
            let eig = sub.symmetric_eigen();
            blocks.push(Block {
                indices,
                energies: eig.eigenvalues.iter().copied().collect(),
                vectors: eig.eigenvectors,
            });
        }
        Ok(Self { dim, blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of invariant blocks found.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// exp(−iHt)|ψ⟩.
    pub fn evolve(&self, psi: &DVector<C64>, t: f64) -> DVector<C64> {
        let mut out = DVector::zeros(self.dim);
        for b in &self.blocks {
            let local = DVector::from_iterator(b.indices.len(), b.indices.iter().map(|&i| psi[i]));
            let mut coeffs = b.vectors.ad_mul(&local);
            for (c, &e) in coeffs.iter_mut().zip(&b.energies) {
                *c *= C64::from_polar(1.0, -e * t);
            }
            let back = &b.vectors * coeffs;
            for (&i, v) in b.indices.iter().zip(back.iter()) {
                out[i] = *v;
            }
        }
        out
    }

    /// Dense U(t) = exp(−iHt).
    pub fn unitary(&self, t: f64) -> DMatrix<C64> {
        let mut u = DMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let phases = DVector::from_iterator(
                b.energies.len(),
                b.energies.iter().map(|&e| C64::from_polar(1.0, -e * t)),
            );
            let mut scaled = b.vectors.clone();
            for (mut col, p) in scaled.column_iter_mut().zip(phases.iter()) {
                col *= *p;
            }
            let block = scaled * b.vectors.adjoint();
            for (p, &i) in b.indices.iter().enumerate() {
                for (q, &j) in b.indices.iter().enumerate() {
                    u[(i, j)] = block[(p, q)];
                }
            }
        }
        u
    }
}

/// Schrödinger evolution of a pure state, sampled on `t_grid`.
///
/// The default method propagates exactly via [`Propagator`]; `Method::Rk4`
/// integrates with fixed RK4 steps of at most `settings.dt` instead.
pub fn evolve_unitary(
    state: &JointState,
    hamiltonian: &OperatorMatrix,
    t_grid: &[f64],
    settings: &IntegratorSettings,
) -> Result<Evolution> {
    let psi0 = state
        .as_pure()
        .ok_or_else(|| Error::InvalidParameter {
            field: "state",
            reason: "unitary evolution needs a pure state".into(),
        })?
        .clone();
    hamiltonian.check_basis(state.basis())?;
    check_grid(t_grid)?;
    let basis = *state.basis();

    let mut series = TimeSeries::default();
    let mut psi = psi0.clone();
    match settings.method {
        Method::Eigendecomposition => {
            let propagator = Propagator::new(hamiltonian)?;
            for &t in t_grid {
                psi = propagator.evolve(&psi0, t);
                record(&mut series, basis, &psi, t, settings)?;
            }
        }
        Method::Rk4 => {
            let herm = hamiltonian.hermiticity_error();
            if herm > HERMITIAN_TOL * hamiltonian.max_abs().max(1.0) {
                return Err(Error::NotHermitian(herm));
            }
            let h = hamiltonian.to_csr();
            let mut now = 0.0;
            for &t in t_grid {
                let span = t - now;
                if span > 0.0 {
                    let steps = (span / settings.dt - 1e-9).ceil().max(1.0) as usize;
                    let dt = span / steps as f64;
                    for _ in 0..steps {
                        psi = rk4_schrodinger(&h, &psi, dt);
                    }
                }
                now = t;
                record(&mut series, basis, &psi, t, settings)?;
            }
        }
    }
    let final_state = JointState::from_repr_unchecked(basis, JointRepr::Pure(psi));
    Ok(Evolution { series, final_state })
}

fn record(
    series: &mut TimeSeries,
    basis: crate::hilbert::BasisSpec,
    psi: &DVector<C64>,
    t: f64,
    settings: &IntegratorSettings,
) -> Result<()> {
    let st = JointState::from_repr_unchecked(basis, JointRepr::Pure(psi.clone()));
    let leak = truncation_leak(&st);
    if leak > settings.tail_abort_threshold {
        return Err(Error::TailExceeded {
            tail: leak,
            threshold: settings.tail_abort_threshold,
            time: t,
        });
    }
    series.push(t, &observables(&st));
    Ok(())
}

fn rk4_schrodinger(h: &nalgebra_sparse::CsrMatrix<C64>, psi: &DVector<C64>, dt: f64) -> DVector<C64> {
    let minus_i = C64::new(0.0, -1.0);
    let f = |v: &DVector<C64>| -> DVector<C64> {
        let mut out = DVector::zeros(v.len());
        for (i, row) in h.row_iter().enumerate() {
            let s: C64 = row
                .col_indices()
                .iter()
                .zip(row.values())
                .map(|(&j, x)| x * v[j])
                .sum();
            out[i] = s * minus_i;
        }
        out
    };
    let k1 = f(psi);
    let k2 = f(&(psi + &k1 * C64::from(0.5 * dt)));
    let k3 = f(&(psi + &k2 * C64::from(0.5 * dt)));
    let k4 = f(&(psi + &k3 * C64::from(dt)));
    psi + (k1 + (k2 + k3) * C64::from(2.0) + k4) * C64::from(dt / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DissipationSpec;
    use crate::hilbert::{excitation_number, tc_hamiltonian, BasisSpec};
    use crate::states::{joint_product_state, AtomicState, FieldState};

    fn settings() -> IntegratorSettings {
        IntegratorSettings::guarded(1.0, &DissipationSpec::lossless())
    }

    #[test]
    fn vacuum_rabi_oscillation() {
        let g = 2.0;
        let s = BasisSpec::new(1, 1).unwrap();
        let h = tc_hamiltonian(&s, g).unwrap();
        let st = joint_product_state(&AtomicState::excited(1).unwrap(), &FieldState::vacuum(&s)).unwrap();
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
        let ev = evolve_unitary(&st, &h, &grid, &settings()).unwrap();
        for (t, n) in ev.series.times.iter().zip(&ev.series.mean_n) {
            assert!((n - (g * t).sin().powi(2)).abs() < 1e-12);
        }
        let quarter = std::f64::consts::FRAC_PI_2 / g;
        let ev = evolve_unitary(&st, &h, &[quarter], &settings()).unwrap();
        assert!((ev.series.mean_n[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_coupling_is_identity() {
        let s = BasisSpec::new(2, 3).unwrap();
        let h = tc_hamiltonian(&s, 0.0).unwrap();
        let st = joint_product_state(
            &AtomicState::dicke(2, 1).unwrap(),
            &FieldState::fock(&s, 2).unwrap(),
        )
        .unwrap();
        let ev = evolve_unitary(&st, &h, &[0.0, 1.0, 5.0], &settings()).unwrap();
        assert_eq!(ev.final_state.as_pure().unwrap(), st.as_pure().unwrap());
    }

    #[test]
    fn blocks_follow_excitation_sectors() {
        let s = BasisSpec::new(3, 8).unwrap();
        let p = Propagator::new(&tc_hamiltonian(&s, 1.0).unwrap()).unwrap();
        // excitation numbers 0..=11 each form one block
        assert_eq!(p.block_count(), 12);
        let u = p.unitary(0.7);
        let id = &u * u.adjoint();
        assert!((id - DMatrix::<C64>::identity(s.joint_dim(), s.joint_dim())).camax() < 1e-12);
        let nexc = excitation_number(&s).to_dense();
        assert!((&u * &nexc - &nexc * &u).camax() < 1e-12);
    }

    #[test]
    fn rk4_agrees_with_eigendecomposition() {
        let st = joint_product_state(
            &crate::states::superposition_atomic_state(2, &crate::states::PumpSpec::half_pi(0.3)).unwrap(),
            &crate::states::coherent_state(C64::new(0.0, 0.4), &BasisSpec::new(2, 13).unwrap()).unwrap(),
        )
        .unwrap();
        let h = tc_hamiltonian(st.basis(), 1.0).unwrap();
        let grid = crate::dynamics::linear_grid(1.0, 10);
        let mut set = IntegratorSettings::guarded(2.0, &DissipationSpec::lossless());
        let exact = evolve_unitary(&st, &h, &grid, &set).unwrap();
        set.method = Method::Rk4;
        set.dt = 0.005;
        let rk = evolve_unitary(&st, &h, &grid, &set).unwrap();
        for (a, b) in exact.series.mean_n.iter().zip(&rk.series.mean_n) {
            assert!((a - b).abs() < 1e-7, "{a} vs {b}");
        }
    }

    #[test]
    fn rejects_non_hermitian_and_mixed() {
        let s = BasisSpec::new(1, 2).unwrap();
        let bad =
            OperatorMatrix::from_triplets(BasisTag::Joint, s.joint_dim(), &[(0, 1, C64::new(1.0, 0.0))]);
        assert!(matches!(Propagator::new(&bad), Err(Error::NotHermitian(_))));
        let st = joint_product_state(&AtomicState::ground(1).unwrap(), &FieldState::vacuum(&s)).unwrap();
        let h = tc_hamiltonian(&s, 1.0).unwrap();
        assert!(evolve_unitary(&st.into_density(), &h, &[0.0], &settings()).is_err());
    }

    #[test]
    fn tail_abort() {
        // two photons on a cutoff of 2 with an excited atom: a†J⁻ pushes past the cutoff
        let s = BasisSpec::new(1, 2).unwrap();
        let h = tc_hamiltonian(&s, 1.0).unwrap();
        let st = joint_product_state(
            &AtomicState::excited(1).unwrap(),
            &FieldState::fock(&s, 2).unwrap(),
        )
        .unwrap();
        let err = evolve_unitary(&st, &h, &[0.0, 0.1], &settings()).unwrap_err();
        assert!(matches!(err, Error::TailExceeded { .. }));
    }
}
