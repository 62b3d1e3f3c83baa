// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Initial field, atomic and joint states.
//!
//! Phase convention: the pump phase φ₀ multiplies each excited amplitude as
//! e^{−iφ₀} and is measured relative to the phase of the cavity input field.
//! With H = g(a†J⁻ + aJ⁺) the field radiated by |Ψ⟩_a starting from vacuum
//! has ⟨a⟩ ≈ −i g t ⟨J⁻⟩, i.e. arg α = −π/2 − φ₀ in the short-time regime.

use nalgebra::{DMatrix, DVector};

use crate::hilbert::{parity, BasisSpec, OperatorMatrix};
use crate::{Error, Result, C64};

const NORM_TOL: f64 = 1e-10;

/// Truncated-Fock field amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    amplitudes: DVector<C64>,
    discarded: f64,
}

impl FieldState {
    pub fn vacuum(spec: &BasisSpec) -> Self {
        Self::fock(spec, 0).expect("vacuum always fits")
    }

    /// Number state |n⟩.
    pub fn fock(spec: &BasisSpec, photons: usize) -> Result<Self> {
        if photons > spec.fock_cutoff() {
            return Err(Error::InvalidBasis(format!(
                "Fock state |{photons}⟩ above cutoff {}",
                spec.fock_cutoff()
            )));
        }
        let mut amplitudes = DVector::zeros(spec.field_dim());
        amplitudes[photons] = C64::new(1.0, 0.0);
        Ok(Self {
            amplitudes,
            discarded: 0.0,
        })
    }

    /// Normalizes arbitrary amplitudes.
    pub fn from_amplitudes(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter {
                field: "amplitudes",
                reason: "field state must have a finite nonzero norm".into(),
            });
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
            discarded: 0.0,
        })
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn fock_cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Probability discarded by truncation before renormalization.
    pub fn discarded_probability(&self) -> f64 {
        self.discarded
    }

    /// |c_{n_max}|².
    pub fn top_population(&self) -> f64 {
        self.amplitudes[self.amplitudes.len() - 1].norm_sqr()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// ⟨a⟩.
    pub fn mean_amplitude(&self) -> C64 {
        (1..self.amplitudes.len())
            .map(|n| self.amplitudes[n - 1].conj() * self.amplitudes[n] * (n as f64).sqrt())
            .sum()
    }

    /// R_π |ψ⟩: flips the sign of odd photon-number amplitudes.
    pub fn phase_flipped(&self) -> Self {
        let amplitudes = DVector::from_fn(self.amplitudes.len(), |n, _| self.amplitudes[n] * parity(n));
        Self {
            amplitudes,
            discarded: self.discarded,
        }
    }
}

/// Amplitudes over the Dicke ladder, indexed by the number of excited atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicState {
    amplitudes: DVector<C64>,
}

impl AtomicState {
    /// All atoms in |g⟩ (m = −J).
    pub fn ground(n_atoms: usize) -> Result<Self> {
        Self::dicke(n_atoms, 0)
    }

    /// All atoms in |e⟩ (m = +J).
    pub fn excited(n_atoms: usize) -> Result<Self> {
        Self::dicke(n_atoms, n_atoms)
    }

    /// Dicke state with `excited` excitations.
    pub fn dicke(n_atoms: usize, excited: usize) -> Result<Self> {
        if n_atoms == 0 || excited > n_atoms {
            return Err(Error::InvalidParameter {
                field: "n_atoms",
                reason: format!("need 0 <= k <= N with N >= 1, got N = {n_atoms}, k = {excited}"),
            });
        }
        let mut amplitudes = DVector::zeros(n_atoms + 1);
        amplitudes[excited] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn from_amplitudes(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.len() < 2 || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter {
                field: "amplitudes",
                reason: "atomic state needs at least two levels and a finite nonzero norm".into(),
            });
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn mean_jz(&self) -> f64 {
        let j = self.n_atoms() as f64 / 2.0;
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(k, c)| (k as f64 - j) * c.norm_sqr())
            .sum()
    }

    /// ⟨J⁻⟩.
    pub fn mean_lowering(&self) -> C64 {
        let n = self.n_atoms();
        (1..=n)
            .map(|k| {
                self.amplitudes[k - 1].conj() * self.amplitudes[k] * crate::hilbert::lowering_element(n, k)
            })
            .sum()
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &AtomicState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }

    pub fn to_density(&self) -> DMatrix<C64> {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// Pump pulse area Θ ∈ [0, π] and phase φ₀ ∈ [0, 2π).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PumpSpec {
    pulse_area: f64,
    phase: f64,
}

impl PumpSpec {
    /// Phases outside [0, 2π) are wrapped.
    pub fn new(pulse_area: f64, phase: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI + 1e-12).contains(&pulse_area) {
            return Err(Error::InvalidParameter {
                field: "pulse_area",
                reason: format!("must lie in [0, pi], got {pulse_area}"),
            });
        }
        if !phase.is_finite() {
            return Err(Error::InvalidParameter {
                field: "phase",
                reason: "must be finite".into(),
            });
        }
        Ok(Self {
            pulse_area: pulse_area.min(std::f64::consts::PI),
            phase: phase.rem_euclid(std::f64::consts::TAU),
        })
    }

    /// Θ = π/2, the maximal-dipole state.
    pub fn half_pi(phase: f64) -> Self {
        Self::new(std::f64::consts::FRAC_PI_2, phase).expect("valid pump")
    }

    pub fn ground() -> Self {
        Self::new(0.0, 0.0).expect("valid pump")
    }

    pub fn pulse_area(&self) -> f64 {
        self.pulse_area
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }
}

/// Field in a coherent state |α⟩ truncated to the cutoff and renormalized.
///
/// Requires n_max ≥ |α|² + 6|α| + 10, which keeps the discarded Poisson tail
/// below 1e−8 for |α| ≤ 4.
pub fn coherent_state(alpha: C64, spec: &BasisSpec) -> Result<FieldState> {
    let required = coherent_cutoff(alpha.norm());
    if spec.fock_cutoff() < required {
        return Err(Error::CutoffTooSmall {
            cutoff: spec.fock_cutoff(),
            amplitude: alpha.norm(),
            required,
        });
    }
    let mut amplitudes = DVector::zeros(spec.field_dim());
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amplitudes[0] = c;
    for n in 1..spec.field_dim() {
        c = c * alpha / (n as f64).sqrt();
        amplitudes[n] = c;
    }
    let kept = amplitudes.norm_squared();
    Ok(FieldState {
        amplitudes: amplitudes.unscale(kept.sqrt()),
        discarded: (1.0 - kept).max(0.0),
    })
}

/// Smallest cutoff accepted by [`coherent_state`] for amplitude |α|.
pub fn coherent_cutoff(amplitude: f64) -> usize {
    (amplitude * amplitude + 6.0 * amplitude + 10.0).ceil() as usize
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Pump-prepared product state ∏_k [cos(Θ/2)|g⟩ + e^{−iφ₀} sin(Θ/2)|e⟩]
/// written on the Dicke ladder.
pub fn superposition_atomic_state(n_atoms: usize, pump: &PumpSpec) -> Result<AtomicState> {
    if n_atoms == 0 {
        return Err(Error::InvalidParameter {
            field: "n_atoms",
            reason: "need at least one atom".into(),
        });
    }
    let (s, c) = (pump.pulse_area() / 2.0).sin_cos();
    let amplitudes = DVector::from_fn(n_atoms + 1, |k, _| {
        let magnitude = binomial(n_atoms, k).sqrt() * c.powi((n_atoms - k) as i32) * s.powi(k as i32);
        C64::from_polar(magnitude, -(k as f64) * pump.phase())
    });
    AtomicState::from_amplitudes(amplitudes)
}

/// Single-atom coherence ρ_eg = cos(Θ/2) sin(Θ/2) e^{−iφ₀}.
pub fn atomic_coherence(pump: &PumpSpec) -> C64 {
    C64::from_polar(0.5 * pump.pulse_area().sin(), -pump.phase())
}

#[derive(Clone, Debug, PartialEq)]
pub enum JointRepr {
    Pure(DVector<C64>),
    Density(DMatrix<C64>),
}

/// State of the joint field ⊗ atom system.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    basis: BasisSpec,
    repr: JointRepr,
}

impl JointState {
    /// Unit-norm pure state (checked within 1e−10).
    pub fn pure(basis: BasisSpec, vector: DVector<C64>) -> Result<Self> {
        if vector.len() != basis.joint_dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.joint_dim(),
                got: vector.len(),
            });
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter {
                field: "state",
                reason: format!("pure state norm {norm} differs from 1"),
            });
        }
        Ok(Self {
            basis,
            repr: JointRepr::Pure(vector),
        })
    }

    /// Hermitian unit-trace density matrix.
    pub fn density(basis: BasisSpec, rho: DMatrix<C64>) -> Result<Self> {
        if rho.nrows() != basis.joint_dim() || !rho.is_square() {
            return Err(Error::DimensionMismatch {
                expected: basis.joint_dim(),
                got: rho.nrows(),
            });
        }
        let herm = (&rho - rho.adjoint()).camax();
        if herm > 1e-10 {
            return Err(Error::NotHermitian(herm));
        }
        let trace = rho.trace().re;
        if (trace - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParameter {
                field: "state",
                reason: format!("density matrix trace {trace} differs from 1"),
            });
        }
        Ok(Self {
            basis,
            repr: JointRepr::Density(rho),
        })
    }

    pub(crate) fn from_repr_unchecked(basis: BasisSpec, repr: JointRepr) -> Self {
        Self { basis, repr }
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn repr(&self) -> &JointRepr {
        &self.repr
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, JointRepr::Pure(_))
    }

    pub fn as_pure(&self) -> Option<&DVector<C64>> {
        match &self.repr {
            JointRepr::Pure(v) => Some(v),
            JointRepr::Density(_) => None,
        }
    }

    pub fn to_density(&self) -> DMatrix<C64> {
        match &self.repr {
            JointRepr::Pure(v) => v * v.adjoint(),
            JointRepr::Density(m) => m.clone(),
        }
    }

    /// Promotes a pure state to |ψ⟩⟨ψ|.
    pub fn into_density(self) -> Self {
        let rho = self.to_density();
        Self {
            basis: self.basis,
            repr: JointRepr::Density(rho),
        }
    }

    /// Norm for pure states, trace for density matrices.
    pub fn norm_or_trace(&self) -> f64 {
        match &self.repr {
            JointRepr::Pure(v) => v.norm(),
            JointRepr::Density(m) => m.trace().re,
        }
    }

    /// Applies a joint operator: |ψ⟩ → O|ψ⟩ or ρ → O ρ O†.
    pub fn transformed(&self, op: &OperatorMatrix) -> Result<Self> {
        op.check_basis(&self.basis)?;
        let repr = match &self.repr {
            JointRepr::Pure(v) => JointRepr::Pure(op.apply(v)?),
            JointRepr::Density(m) => {
                let o = op.to_dense();
                JointRepr::Density(&o * m * o.adjoint())
            }
        };
        Ok(Self {
            basis: self.basis,
            repr,
        })
    }

    /// Reduced atomic density matrix (field traced out).
    pub fn atomic_density(&self) -> DMatrix<C64> {
        let b = &self.basis;
        let da = b.atomic_dim();
        let mut out = DMatrix::zeros(da, da);
        for n in 0..b.field_dim() {
            for k in 0..da {
                for l in 0..da {
                    let (i, j) = (b.joint_index(n, k), b.joint_index(n, l));
                    out[(k, l)] += match &self.repr {
                        JointRepr::Pure(v) => v[i] * v[j].conj(),
                        JointRepr::Density(m) => m[(i, j)],
                    };
                }
            }
        }
        out
    }

    /// Reduced field density matrix (atoms traced out).
    pub fn field_density(&self) -> DMatrix<C64> {
        let b = &self.basis;
        let df = b.field_dim();
        let mut out = DMatrix::zeros(df, df);
        for n in 0..df {
            for p in 0..df {
                for k in 0..b.atomic_dim() {
                    let (i, j) = (b.joint_index(n, k), b.joint_index(p, k));
                    out[(n, p)] += match &self.repr {
                        JointRepr::Pure(v) => v[i] * v[j].conj(),
                        JointRepr::Density(m) => m[(i, j)],
                    };
                }
            }
        }
        out
    }

    /// ⟨Ψ|ρ_atoms|Ψ⟩ for a pure atomic reference state.
    pub fn atomic_fidelity(&self, reference: &AtomicState) -> Result<f64> {
        if reference.amplitudes().len() != self.basis.atomic_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.atomic_dim(),
                got: reference.amplitudes().len(),
            });
        }
        let rho = self.atomic_density();
        let v = reference.amplitudes();
        Ok(v.dotc(&(rho * v)).re)
    }

    /// Purity tr(ρ²).
    pub fn purity(&self) -> f64 {
        match &self.repr {
            JointRepr::Pure(v) => v.norm_squared().powi(2),
            JointRepr::Density(m) => m.iter().map(|c| c.norm_sqr()).sum(),
        }
    }
}

/// |Ψ⟩_a ⊗ |φ⟩_f on the joint basis implied by the two factors.
pub fn joint_product_state(atom: &AtomicState, field: &FieldState) -> Result<JointState> {
    let basis = BasisSpec::new(atom.n_atoms(), field.fock_cutoff())?;
    let fa = field.amplitudes();
    let aa = atom.amplitudes();
    let v = DVector::from_fn(basis.joint_dim(), |i, _| {
        let (n, k) = basis.split_index(i);
        fa[n] * aa[k]
    });
    let norm = v.norm();
    JointState::pure(basis, v.unscale(norm))
}

/// Product state on an explicitly given basis, checking both factors.
pub fn joint_product_state_on(
    basis: &BasisSpec,
    atom: &AtomicState,
    field: &FieldState,
) -> Result<JointState> {
    if atom.amplitudes().len() != basis.atomic_dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.atomic_dim(),
            got: atom.amplitudes().len(),
        });
    }
    if field.amplitudes().len() != basis.field_dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.field_dim(),
            got: field.amplitudes().len(),
        });
    }
    joint_product_state(atom, field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::collective_lowering;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn spec(n: usize, cutoff: usize) -> BasisSpec {
        BasisSpec::new(n, cutoff).unwrap()
    }

    #[test]
    fn coherent_zero_is_vacuum() {
        let f = coherent_state(C64::new(0.0, 0.0), &spec(1, 10)).unwrap();
        assert_eq!(f, FieldState::vacuum(&spec(1, 10)));
    }

    #[test]
    fn coherent_moments() {
        let f = coherent_state(C64::new(1.0, 0.0), &spec(1, 20)).unwrap();
        assert!((f.mean_photon_number() - 1.0).abs() < 1e-8);
        assert!((f.amplitudes()[0].re - (-0.5f64).exp()).abs() < 1e-8);
        assert!((f.amplitudes()[0].re - 0.6065).abs() < 1e-4);
        assert!((f.norm() - 1.0).abs() < 1e-12);

        let f = coherent_state(C64::new(2.0, 0.0), &spec(1, 30)).unwrap();
        assert!((f.mean_photon_number() - 4.0).abs() < 1e-8);
        assert!(f.discarded_probability() < 1e-8);
        assert!((f.mean_amplitude() - C64::new(2.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn coherent_rejects_small_cutoff() {
        let err = coherent_state(C64::new(2.0, 0.0), &spec(1, 20)).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { required: 26, .. }));
    }

    #[test]
    fn phase_flip_maps_alpha_to_minus_alpha() {
        let s = spec(1, 40);
        let alpha = C64::new(1.3, -0.8);
        let flipped = coherent_state(alpha, &s).unwrap().phase_flipped();
        let target = coherent_state(-alpha, &s).unwrap();
        let diff = (flipped.amplitudes() - target.amplitudes()).camax();
        assert!(diff < 1e-12);
        let r = crate::hilbert::field_phase_flip(&s);
        let via_op = r.apply(coherent_state(alpha, &s).unwrap().amplitudes()).unwrap();
        assert!((via_op - target.amplitudes()).camax() < 1e-12);
    }

    #[test]
    fn superposition_limits() {
        for n in 1..6 {
            let g = superposition_atomic_state(n, &PumpSpec::new(0.0, 0.4).unwrap()).unwrap();
            assert_eq!(g, AtomicState::ground(n).unwrap());
            let e = superposition_atomic_state(n, &PumpSpec::new(PI, 0.0).unwrap()).unwrap();
            assert!((e.fidelity(&AtomicState::excited(n).unwrap()) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn two_atom_half_pi_amplitudes() {
        // (|g⟩+|e⟩)⊗(|g⟩+|e⟩)/2 = ½|gg⟩ + (1/√2)(|ge⟩+|eg⟩)/√2 + ½|ee⟩
        let a = superposition_atomic_state(2, &PumpSpec::half_pi(0.0)).unwrap();
        let expected = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (c, e) in a.amplitudes().iter().zip(expected) {
            assert!((c - C64::new(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn macro_dipole() {
        for n in 1..9 {
            let pump = PumpSpec::new(1.1, 2.3).unwrap();
            let a = superposition_atomic_state(n, &pump).unwrap();
            let expected = atomic_coherence(&pump) * n as f64;
            assert!((a.mean_lowering() - expected).norm() < 1e-10);
            let jm = collective_lowering(&spec(n, 1));
            let direct = a.amplitudes().dotc(&jm.apply(a.amplitudes()).unwrap());
            assert!((direct - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn coherence_values() {
        assert_eq!(atomic_coherence(&PumpSpec::ground()).norm(), 0.0);
        let c = atomic_coherence(&PumpSpec::half_pi(0.0));
        assert!((c - C64::new(0.5, 0.0)).norm() < 1e-15);
        let c = atomic_coherence(&PumpSpec::new(PI / 3.0, PI).unwrap());
        assert!((c.re + 0.4330).abs() < 1e-4);
        assert!((c.re + 0.5 * (PI / 3.0).sin()).abs() < 1e-15);
        assert!(c.im.abs() < 1e-15);
        assert!((atomic_coherence(&PumpSpec::new(FRAC_PI_2, 0.0).unwrap()).norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pump_validation() {
        assert!(PumpSpec::new(-0.1, 0.0).is_err());
        assert!(PumpSpec::new(3.5, 0.0).is_err());
        assert!((PumpSpec::new(1.0, -0.5).unwrap().phase() - (std::f64::consts::TAU - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn product_states() {
        let s = spec(3, 4);
        let j = joint_product_state(&AtomicState::ground(3).unwrap(), &FieldState::vacuum(&s)).unwrap();
        let v = j.as_pure().unwrap();
        assert_eq!(v.iter().filter(|c| c.norm() > 0.0).count(), 1);
        assert_eq!(v[0], C64::new(1.0, 0.0));

        let atom = superposition_atomic_state(3, &PumpSpec::new(0.7, 1.9).unwrap()).unwrap();
        let field = coherent_state(C64::new(0.3, 0.2), &spec(3, 14)).unwrap();
        let joint = joint_product_state(&atom, &field).unwrap();
        assert!((joint.norm_or_trace() - 1.0).abs() < 1e-12);
        let rho_a = joint.atomic_density();
        assert!((rho_a - atom.to_density()).camax() < 1e-12);
        let rho_f = joint.field_density();
        let expected = field.amplitudes() * field.amplitudes().adjoint();
        assert!((rho_f - expected).camax() < 1e-12);
        assert!((joint.purity() - 1.0).abs() < 1e-12);
        assert!((joint.clone().into_density().purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_on_checks_dims() {
        let atom = AtomicState::ground(2).unwrap();
        let field = FieldState::vacuum(&spec(2, 5));
        assert!(joint_product_state_on(&spec(3, 5), &atom, &field).is_err());
        assert!(joint_product_state_on(&spec(2, 4), &atom, &field).is_err());
        assert!(joint_product_state_on(&spec(2, 5), &atom, &field).is_ok());
    }
}
