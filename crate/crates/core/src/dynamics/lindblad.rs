// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use nalgebra_sparse::CsrMatrix;

use super::{
    check_grid, observables, truncation_leak, DissipationSpec, Evolution, IntegratorSettings, TimeSeries,
};
use crate::hilbert::{collective_lowering, embed_joint, fock_annihilator, BasisTag, OperatorMatrix};
use crate::states::{JointRepr, JointState};
use crate::{Error, Result, C64};

/// Eigenvalues of ρ below −POSITIVITY_TOL abort the run.
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Upper bound on dt·‖−iH_eff‖_∞ for the inner RK4 steps. The step guard
/// alone ignores the √n growth of a and lets RK4 drive ρ visibly
/// non-positive in the Fock tail.
pub(crate) const STIFFNESS_LIMIT: f64 = 0.1;

/// Precomputed sparse pieces of the Lindblad generator.
struct Generator {
    /// −i H_eff with H_eff = H − (i/2) Σ L†L.
    drift: CsrMatrix<C64>,
    jumps: Vec<CsrMatrix<C64>>,
}

impl Generator {
    fn new(h: &OperatorMatrix, jumps: &[OperatorMatrix]) -> Result<Self> {
        let mut heff = h.clone();
        for l in jumps {
            let ll = l.adjoint().matmul(l)?;
            heff = heff.sub(&ll.scale(C64::new(0.0, 0.5)))?;
        }
        let drift = heff.scale(C64::new(0.0, -1.0)).to_csr();
        Ok(Self {
            drift,
            jumps: jumps.iter().map(OperatorMatrix::to_csr).collect(),
        })
    }

    /// Largest absolute row sum of −iH_eff.
    fn drift_bound(&self) -> f64 {
        (0..self.drift.nrows())
            .map(|i| self.drift.row(i).values().iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// dρ/dt for Hermitian ρ: X + X† + Σ L (L ρ)†, with X = −i H_eff ρ.
    fn rhs(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let x = spmm(&self.drift, rho);
        let mut out = &x + x.adjoint();
        for l in &self.jumps {
            let y = spmm(l, rho);
            out += spmm(l, &y.adjoint());
        }
        out
    }

    fn step(&self, rho: &DMatrix<C64>, dt: f64) -> DMatrix<C64> {
        let k1 = self.rhs(rho);
        let k2 = self.rhs(&(rho + &k1 * C64::from(0.5 * dt)));
        let k3 = self.rhs(&(rho + &k2 * C64::from(0.5 * dt)));
        let k4 = self.rhs(&(rho + &k3 * C64::from(dt)));
        rho + (k1 + (k2 + k3) * C64::from(2.0) + k4) * C64::from(dt / 6.0)
    }
}

/// Sparse × dense product, column by column.
fn spmm(a: &CsrMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (rows, cols) = (a.nrows(), b.ncols());
    let mut out = DMatrix::<C64>::zeros(rows, cols);
    let (offsets, indices, values) = a.csr_data();
    let inner = b.nrows();
    let bs = b.as_slice();
    let os = out.as_mut_slice();
    for c in 0..cols {
        let bcol = &bs[c * inner..(c + 1) * inner];
        let ocol = &mut os[c * rows..(c + 1) * rows];
        for i in 0..rows {
            let mut acc = C64::new(0.0, 0.0);
            for p in offsets[i]..offsets[i + 1] {
                acc += values[p] * bcol[indices[p]];
            }
            ocol[i] = acc;
        }
    }
    out
}

fn hermitize(rho: &mut DMatrix<C64>) {
    let h = (&*rho + rho.adjoint()) * C64::from(0.5);
    *rho = h;
}

/// λ_min(ρ) ≥ −tol, tested by a Cholesky factorization of ρ + tol·1.
///
/// nalgebra's complex Cholesky accepts negative pivots, so the
/// factorization is done here with an explicit real-pivot test.
pub fn is_positive_within(rho: &DMatrix<C64>, tol: f64) -> bool {
    let n = rho.nrows();
    let mut l = rho + DMatrix::<C64>::identity(n, n) * C64::from(tol);
    for j in 0..n {
        let mut pivot = l[(j, j)].re;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if !(pivot > 0.0) {
            return false;
        }
        let d = pivot.sqrt();
        l[(j, j)] = C64::from(d);
        for i in j + 1..n {
            let mut v = l[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / d;
        }
    }
    true
}

/// Jump operators √(2γ_c) a and, when enabled, √(2γ_a) J⁻ on the joint space.
pub fn jump_operators(
    basis: &crate::hilbert::BasisSpec,
    dissipation: &DissipationSpec,
) -> Result<Vec<OperatorMatrix>> {
    let mut out = Vec::new();
    if dissipation.cavity_rate() > 0.0 {
        let a = fock_annihilator(basis)?;
        let id = OperatorMatrix::identity(BasisTag::Atomic, basis.atomic_dim());
        out.push(embed_joint(&a, &id)?.scale(C64::from((2.0 * dissipation.cavity_rate()).sqrt())));
    }
    let gamma_a = dissipation.effective_atomic_rate();
    if gamma_a > 0.0 {
        let id = OperatorMatrix::identity(BasisTag::Field, basis.field_dim());
        let jm = collective_lowering(basis);
        out.push(embed_joint(&id, &jm)?.scale(C64::from((2.0 * gamma_a).sqrt())));
    }
    Ok(out)
}

/// Master-equation evolution with fixed-step RK4, sampled on `t_grid`.
///
/// Pure inputs are promoted to density matrices. Each grid interval is
/// split into equal steps no longer than `settings.dt`, shortened further
/// when the generator norm demands it. At every sample the
/// truncation leak is compared with `settings.tail_abort_threshold`, and
/// positivity is checked to [`POSITIVITY_TOL`] every
/// `settings.positivity_every` samples.
pub fn evolve_lindblad(
    state: &JointState,
    hamiltonian: &OperatorMatrix,
    dissipation: &DissipationSpec,
    t_grid: &[f64],
    settings: &IntegratorSettings,
) -> Result<Evolution> {
    let basis = *state.basis();
    hamiltonian.check_basis(&basis)?;
    check_grid(t_grid)?;
    settings.check_guard(dissipation)?;
    let herm = hamiltonian.hermiticity_error();
    if herm > 1e-12 * hamiltonian.max_abs().max(1.0) {
        return Err(Error::NotHermitian(herm));
    }

    let generator = Generator::new(hamiltonian, &jump_operators(&basis, dissipation)?)?;
    let bound = generator.drift_bound();
    let max_dt = if bound > 0.0 {
        settings.dt.min(STIFFNESS_LIMIT / bound)
    } else {
        settings.dt
    };
    let mut rho = state.to_density();
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
            hermitize(&mut rho);
        }
        now = t;

        let current = JointState::from_repr_unchecked(basis, JointRepr::Density(rho.clone()));
        let leak = truncation_leak(&current);
        if leak > settings.tail_abort_threshold {
            return Err(Error::TailExceeded {
                tail: leak,
                threshold: settings.tail_abort_threshold,
                time: t,
            });
        }
        let check = settings.positivity_every > 0
            && (sample % settings.positivity_every == 0 || sample + 1 == t_grid.len());
        if check && !is_positive_within(&rho, POSITIVITY_TOL) {
            return Err(Error::Positivity {
                time: t,
                tolerance: POSITIVITY_TOL,
            });
        }
        series.push(t, &observables(&current));
    }
    Ok(Evolution {
        series,
        final_state: JointState::from_repr_unchecked(basis, JointRepr::Density(rho)),
    })
}
