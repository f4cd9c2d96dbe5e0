//! Validated matrix types: gates, Hermitian observables, density matrices.

use crate::dense::{self, Matrix, C64};
use crate::error::{QsimError, Result};
use crate::state::StateVector;

const UNITARY_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;
const DENSITY_TOL: f64 = 1e-10;

/// A unitary on `arity` qubits with a display label.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix {
    arity: usize,
    matrix: Matrix,
    label: String,
}

impl GateMatrix {
    pub fn new(label: impl Into<String>, matrix: Matrix) -> Result<Self> {
        let arity = arity_of(&matrix)?;
        let defect = dense::unitarity_defect(&matrix);
        if defect > UNITARY_TOL {
            return Err(QsimError::NotUnitary(defect));
        }
        Ok(Self { arity, matrix, label: label.into() })
    }

    pub(crate) fn new_unchecked(label: impl Into<String>, matrix: Matrix) -> Self {
        let arity = matrix.nrows().trailing_zeros() as usize;
        Self { arity, matrix, label: label.into() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn adjoint(&self) -> GateMatrix {
        GateMatrix::new_unchecked(format!("{}†", self.label), self.matrix.adjoint())
    }
}

fn arity_of(m: &Matrix) -> Result<usize> {
    if !m.is_square() {
        return Err(QsimError::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    if !m.nrows().is_power_of_two() {
        return Err(QsimError::NotPowerOfTwo(m.nrows()));
    }
    Ok(m.nrows().trailing_zeros() as usize)
}

/// Hermitian operator on a qubit register (a Hamiltonian or an observable).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    n_qubits: usize,
    matrix: Matrix,
}

impl HermitianOperator {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let n_qubits = arity_of(&matrix)?;
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let defect = dense::hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL * scale {
            return Err(QsimError::NotHermitian(defect));
        }
        Ok(Self { n_qubits, matrix: dense::hermitian_part(&matrix) })
    }

    pub fn zeros(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        Self { n_qubits, matrix: Matrix::zeros(d, d) }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, matrix: dense::identity(1 << n_qubits) }
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        let d = values.len();
        let m = Matrix::from_fn(d, d, |r, c| if r == c { C64::new(values[r], 0.0) } else { dense::ZERO });
        Self::new(m)
    }

    pub fn pauli_x() -> Self {
        Self { n_qubits: 1, matrix: dense::pauli_x() }
    }

    pub fn pauli_y() -> Self {
        Self { n_qubits: 1, matrix: dense::pauli_y() }
    }

    pub fn pauli_z() -> Self {
        Self { n_qubits: 1, matrix: dense::pauli_z() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { n_qubits: self.n_qubits, matrix: &self.matrix * C64::new(s, 0.0) }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self { n_qubits: self.n_qubits, matrix: &self.matrix + &other.matrix })
    }

    pub fn shifted(&self, c: f64) -> Self {
        let d = self.dim();
        Self { n_qubits: self.n_qubits, matrix: &self.matrix + dense::identity(d) * C64::new(c, 0.0) }
    }

    /// `self ⊗ other` with `other` on the low qubits.
    pub fn kron(&self, low: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + low.n_qubits,
            matrix: dense::kron(&self.matrix, &low.matrix),
        }
    }

    /// Embeds this operator on `support` of an `n_qubits` register.
    pub fn embed(&self, support: &[usize], n_qubits: usize) -> Result<Self> {
        if support.len() != self.n_qubits {
            return Err(QsimError::ArityMismatch { arity: self.n_qubits, targets: support.len() });
        }
        crate::state::validate_qubits(n_qubits, support, &[])?;
        dense::guard_dimension(1 << n_qubits)?;
        Ok(Self { n_qubits, matrix: dense::embed(&self.matrix, support, n_qubits) })
    }

    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        self.check_dim(other.dim())?;
        let c = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        Ok(c.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Eigenvalues ascending and eigenvectors as columns.
    pub fn eigh(&self) -> (Vec<f64>, Matrix) {
        dense::eigh(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        dense::eigvalsh(&self.matrix)
    }

    /// Ground eigenpair.
    pub fn ground_state(&self) -> (f64, StateVector) {
        let (vals, vecs) = self.eigh();
        let amps: Vec<C64> = vecs.column(0).iter().copied().collect();
        (vals[0], StateVector::from_unnormalized(amps).expect("eigenvector is nonzero"))
    }

    /// `exp(scale · A)`, the dense oracle exponential.
    pub fn exp(&self, scale: C64) -> Result<Matrix> {
        dense::expm_hermitian(&self.matrix, scale)
    }

    /// `exp(-iAt)` wrapped as a gate.
    pub fn evolution(&self, t: f64) -> Result<GateMatrix> {
        Ok(GateMatrix::new_unchecked(format!("exp(-iHt) t={t}"), self.exp(C64::new(0.0, -t))?))
    }

    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|e| e.abs()).fold(0.0, f64::max)
    }

    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        dense::gershgorin_bounds(&self.matrix)
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(QsimError::DimensionMismatch { expected: self.dim(), found: d });
        }
        Ok(())
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: Matrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all within 1e-10).
    pub fn new(matrix: Matrix) -> Result<Self> {
        let n_qubits = arity_of(&matrix)?;
        let herm = dense::hermiticity_defect(&matrix);
        if herm > DENSITY_TOL {
            return Err(QsimError::InvalidDensityMatrix(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(QsimError::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min_eig = dense::eigvalsh(&matrix).first().copied().unwrap_or(0.0);
        if min_eig < -DENSITY_TOL {
            return Err(QsimError::InvalidDensityMatrix(format!("eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { n_qubits, matrix: dense::hermitian_part(&matrix) })
    }

    pub(crate) fn new_unchecked(matrix: Matrix) -> Self {
        let n_qubits = matrix.nrows().trailing_zeros() as usize;
        Self { n_qubits, matrix: dense::hermitian_part(&matrix) }
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let v = dense::column_vector(state.amplitudes());
        Self::new_unchecked(&v * v.adjoint())
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self { n_qubits, matrix: dense::identity(d) * C64::new(1.0 / d as f64, 0.0) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// `Tr(Aρ)` with imaginary residue discarded.
    pub fn expectation(&self, a: &HermitianOperator) -> Result<f64> {
        if a.dim() != self.dim() {
            return Err(QsimError::DimensionMismatch { expected: self.dim(), found: a.dim() });
        }
        Ok((a.matrix() * &self.matrix).trace().re)
    }

    /// `self ⊗ low` with `low` on the low qubits.
    pub fn kron(&self, low: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + low.n_qubits,
            matrix: dense::kron(&self.matrix, &low.matrix),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        dense::eigvalsh(&self.matrix)
    }

    /// Column-stacked vectorization.
    pub fn vectorize(&self) -> nalgebra::DVector<C64> {
        nalgebra::DVector::from_column_slice(self.matrix.as_slice())
    }

    pub fn from_vectorized(v: &nalgebra::DVector<C64>) -> Result<Self> {
        let d = (v.len() as f64).sqrt().round() as usize;
        if d * d != v.len() {
            return Err(QsimError::DimensionMismatch { expected: d * d, found: v.len() });
        }
        Self::new(Matrix::from_column_slice(d, d, v.as_slice()))
    }
}
