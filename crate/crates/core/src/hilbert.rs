// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

//! Basis labels and explicit operator matrices on the truncated
//! field ⊗ Dicke product space.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::{Error, Result, C64};

/// Operators whose dimension exceeds this are stored in CSR form.
pub const DENSE_LIMIT: usize = 4096;

/// Atom number and Fock cutoff of one truncated product space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    n_atoms: usize,
    fock_cutoff: usize,
}

impl BasisSpec {
    pub fn new(n_atoms: usize, fock_cutoff: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidBasis("atom number must be positive".into()));
        }
        Ok(Self { n_atoms, fock_cutoff })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    /// Collective spin J = N/2.
    pub fn spin(&self) -> f64 {
        self.n_atoms as f64 / 2.0
    }

    /// Dicke ladder size N + 1 (index k = number of excited atoms = m + J).
    pub fn atomic_dim(&self) -> usize {
        self.n_atoms + 1
    }

    pub fn field_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn joint_dim(&self) -> usize {
        self.atomic_dim() * self.field_dim()
    }

    /// Joint index of |n⟩_f ⊗ |k⟩_a.
    #[inline]
    pub fn joint_index(&self, photons: usize, excited: usize) -> usize {
        photons * self.atomic_dim() + excited
    }

    /// Inverse of [`BasisSpec::joint_index`]: (photons, excited atoms).
    #[inline]
    pub fn split_index(&self, index: usize) -> (usize, usize) {
        (index / self.atomic_dim(), index % self.atomic_dim())
    }

    pub fn dim(&self, tag: BasisTag) -> usize {
        match tag {
            BasisTag::Field => self.field_dim(),
            BasisTag::Atomic => self.atomic_dim(),
            BasisTag::Joint => self.joint_dim(),
        }
    }
}

/// Which factor of the product space an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisTag {
    Field,
    Atomic,
    Joint,
}

#[derive(Clone, Debug)]
enum Storage {
    Dense(DMatrix<C64>),
    Sparse(CsrMatrix<C64>),
}

/// Square complex matrix tagged with the factor it acts on.
///
/// Matrices up to [`DENSE_LIMIT`] are dense, larger ones CSR.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    tag: BasisTag,
    storage: Storage,
}

impl OperatorMatrix {
    /// Builds an operator from (row, col, value) entries; duplicates add up.
    pub fn from_triplets(tag: BasisTag, dim: usize, entries: &[(usize, usize, C64)]) -> Self {
        if dim <= DENSE_LIMIT {
            let mut m = DMatrix::zeros(dim, dim);
            for &(i, j, v) in entries {
                m[(i, j)] += v;
            }
            Self::from_dense(tag, m)
        } else {
            let mut coo = CooMatrix::new(dim, dim);
            for &(i, j, v) in entries {
                coo.push(i, j, v);
            }
            Self {
                tag,
                storage: Storage::Sparse(CsrMatrix::from(&coo)),
            }
        }
    }

    pub fn from_dense(tag: BasisTag, matrix: DMatrix<C64>) -> Self {
        assert!(matrix.is_square(), "operator matrices must be square");
        Self {
            tag,
            storage: Storage::Dense(matrix),
        }
    }

    pub fn identity(tag: BasisTag, dim: usize) -> Self {
        let entries: Vec<_> = (0..dim).map(|i| (i, i, C64::new(1.0, 0.0))).collect();
        Self::from_triplets(tag, dim, &entries)
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Dense(m) => m.nrows(),
            Storage::Sparse(m) => m.nrows(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    /// Same operator, CSR storage regardless of size.
    pub fn into_sparse(self) -> Self {
        let csr = self.to_csr();
        Self {
            tag: self.tag,
            storage: Storage::Sparse(csr),
        }
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        match &self.storage {
            Storage::Dense(m) => {
                let mut out = Vec::new();
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        let v = m[(i, j)];
                        if v != C64::new(0.0, 0.0) {
                            out.push((i, j, v));
                        }
                    }
                }
                out
            }
            Storage::Sparse(m) => m.triplet_iter().map(|(i, j, v)| (i, j, *v)).collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(m) => {
                let mut d = DMatrix::zeros(m.nrows(), m.ncols());
                for (i, j, v) in m.triplet_iter() {
                    d[(i, j)] += *v;
                }
                d
            }
        }
    }

    pub fn to_csr(&self) -> CsrMatrix<C64> {
        match &self.storage {
            Storage::Sparse(m) => m.clone(),
            Storage::Dense(_) => {
                let dim = self.dim();
                let mut coo = CooMatrix::new(dim, dim);
                for (i, j, v) in self.triplets() {
                    coo.push(i, j, v);
                }
                CsrMatrix::from(&coo)
            }
        }
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[(row, col)],
            Storage::Sparse(m) => m.get_entry(row, col).map(|e| e.into_value()).unwrap_or_default(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let entries: Vec<_> = self
            .triplets()
            .into_iter()
            .map(|(i, j, v)| (j, i, v.conj()))
            .collect();
        self.rebuild(self.tag, &entries)
    }

    pub fn scale(&self, factor: C64) -> Self {
        let entries: Vec<_> = self
            .triplets()
            .into_iter()
            .map(|(i, j, v)| (i, j, v * factor))
            .collect();
        self.rebuild(self.tag, &entries)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut entries = self.triplets();
        entries.extend(other.triplets());
        Ok(self.rebuild(self.tag, &entries))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Dense(a), Storage::Dense(b)) => Storage::Dense(a * b),
            _ => Storage::Sparse(&self.to_csr() * &other.to_csr()),
        };
        Ok(Self {
            tag: self.tag,
            storage,
        })
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn apply(&self, vector: &DVector<C64>) -> Result<DVector<C64>> {
        if vector.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: vector.len(),
            });
        }
        Ok(match &self.storage {
            Storage::Dense(m) => m * vector,
            Storage::Sparse(m) => {
                let mut out = DVector::zeros(vector.len());
                for (i, row) in m.row_iter().enumerate() {
                    out[i] = row
                        .col_indices()
                        .iter()
                        .zip(row.values())
                        .map(|(&j, v)| v * vector[j])
                        .sum();
                }
                out
            }
        })
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.triplets()
            .iter()
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Max-norm of `self - self†`.
    pub fn hermiticity_error(&self) -> f64 {
        self.sub(&self.adjoint())
            .map(|d| d.max_abs())
            .unwrap_or(f64::INFINITY)
    }

    pub fn check_basis(&self, spec: &BasisSpec) -> Result<()> {
        let expected = spec.dim(self.tag);
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.tag != other.tag {
            return Err(Error::BasisTag(format!(
                "cannot combine {:?} and {:?} operators",
                self.tag, other.tag
            )));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    fn rebuild(&self, tag: BasisTag, entries: &[(usize, usize, C64)]) -> Self {
        let out = Self::from_triplets(tag, self.dim(), entries);
        if self.is_sparse() {
            out.into_sparse()
        } else {
            out
        }
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Cavity annihilation operator a|n⟩ = √n |n−1⟩ on |0..n_max⟩.
pub fn fock_annihilator(spec: &BasisSpec) -> Result<OperatorMatrix> {
    if spec.fock_cutoff() == 0 {
        return Err(Error::InvalidBasis(
            "Fock cutoff must be at least 1 for field dynamics".into(),
        ));
    }
    let entries: Vec<_> = (1..spec.field_dim())
        .map(|n| (n - 1, n, real((n as f64).sqrt())))
        .collect();
    Ok(OperatorMatrix::from_triplets(
        BasisTag::Field,
        spec.field_dim(),
        &entries,
    ))
}

/// a†a on the field factor.
pub fn number_operator(spec: &BasisSpec) -> OperatorMatrix {
    let entries: Vec<_> = (0..spec.field_dim()).map(|n| (n, n, real(n as f64))).collect();
    OperatorMatrix::from_triplets(BasisTag::Field, spec.field_dim(), &entries)
}

/// Matrix element ⟨k−1|J⁻|k⟩ = √(J(J+1) − m(m−1)) = √(k(N−k+1)).
#[inline]
pub fn lowering_element(n_atoms: usize, excited: usize) -> f64 {
    ((excited * (n_atoms + 1 - excited)) as f64).sqrt()
}

/// Collective lowering operator J⁻ on the Dicke ladder.
pub fn collective_lowering(spec: &BasisSpec) -> OperatorMatrix {
    let n = spec.n_atoms();
    let entries: Vec<_> = (1..=n)
        .map(|k| (k - 1, k, real(lowering_element(n, k))))
        .collect();
    OperatorMatrix::from_triplets(BasisTag::Atomic, spec.atomic_dim(), &entries)
}

/// J_z = diag(m), m = k − N/2.
pub fn collective_jz(spec: &BasisSpec) -> OperatorMatrix {
    let j = spec.spin();
    let entries: Vec<_> = (0..spec.atomic_dim())
        .map(|k| (k, k, real(k as f64 - j)))
        .collect();
    OperatorMatrix::from_triplets(BasisTag::Atomic, spec.atomic_dim(), &entries)
}

/// Kronecker product field ⊗ atomic (field index slow, atomic index fast).
pub fn embed_joint(field_op: &OperatorMatrix, atomic_op: &OperatorMatrix) -> Result<OperatorMatrix> {
    if field_op.tag() != BasisTag::Field || atomic_op.tag() != BasisTag::Atomic {
        return Err(Error::BasisTag(format!(
            "embed_joint expects (Field, Atomic), got ({:?}, {:?})",
            field_op.tag(),
            atomic_op.tag()
        )));
    }
    let da = atomic_op.dim();
    let dim = field_op.dim() * da;
    if dim <= DENSE_LIMIT && !field_op.is_sparse() && !atomic_op.is_sparse() {
        let m = field_op.to_dense().kronecker(&atomic_op.to_dense());
        return Ok(OperatorMatrix::from_dense(BasisTag::Joint, m));
    }
    let fe = field_op.triplets();
    let ae = atomic_op.triplets();
    let mut entries = Vec::with_capacity(fe.len() * ae.len());
    for &(fi, fj, fv) in &fe {
        for &(ai, aj, av) in &ae {
            entries.push((fi * da + ai, fj * da + aj, fv * av));
        }
    }
    let out = OperatorMatrix::from_triplets(BasisTag::Joint, dim, &entries);
    Ok(if field_op.is_sparse() || atomic_op.is_sparse() {
        out.into_sparse()
    } else {
        out
    })
}

/// H = g (a† ⊗ J⁻ + a ⊗ J⁺), ħ = 1.
pub fn tc_hamiltonian(spec: &BasisSpec, coupling: f64) -> Result<OperatorMatrix> {
    let a = fock_annihilator(spec)?;
    let jm = collective_lowering(spec);
    tc_hamiltonian_from(&a, &jm, coupling)
}

/// Tavis-Cummings Hamiltonian from explicit factor operators.
pub fn tc_hamiltonian_from(
    annihilator: &OperatorMatrix,
    lowering: &OperatorMatrix,
    coupling: f64,
) -> Result<OperatorMatrix> {
    if !coupling.is_finite() || coupling < 0.0 {
        return Err(Error::InvalidParameter {
            field: "g",
            reason: format!("coupling must be finite and non-negative, got {coupling}"),
        });
    }
    let emission = embed_joint(&annihilator.adjoint(), lowering)?;
    let absorption = embed_joint(annihilator, &lowering.adjoint())?;
    Ok(emission.add(&absorption)?.scale(real(coupling)))
}

/// Excitation number a†a ⊗ 1 + 1 ⊗ (J_z + J), conserved by the
/// Tavis-Cummings Hamiltonian.
pub fn excitation_number(spec: &BasisSpec) -> OperatorMatrix {
    let entries: Vec<_> = (0..spec.joint_dim())
        .map(|i| {
            let (n, k) = spec.split_index(i);
            (i, i, real((n + k) as f64))
        })
        .collect();
    OperatorMatrix::from_triplets(BasisTag::Joint, spec.joint_dim(), &entries)
}

/// R_π = exp(−iπ a†a) = diag((−1)^n) on the field factor.
pub fn field_phase_flip(spec: &BasisSpec) -> OperatorMatrix {
    let entries: Vec<_> = (0..spec.field_dim()).map(|n| (n, n, real(parity(n)))).collect();
    OperatorMatrix::from_triplets(BasisTag::Field, spec.field_dim(), &entries)
}

/// R_π ⊗ 1 on the joint space.
pub fn phase_flip_operator(spec: &BasisSpec) -> OperatorMatrix {
    let entries: Vec<_> = (0..spec.joint_dim())
        .map(|i| (i, i, real(parity(spec.split_index(i).0))))
        .collect();
    OperatorMatrix::from_triplets(BasisTag::Joint, spec.joint_dim(), &entries)
}

#[inline]
pub(crate) fn parity(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}
