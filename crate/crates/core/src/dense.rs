//! Dense complex linear algebra used as the verification oracle.
//!
//! Everything here works on `nalgebra::DMatrix<Complex64>` and is meant for
//! registers of at most [`DENSE_QUBIT_LIMIT`] qubits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QsimError, Result};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

/// Largest register for which dense exponentials are attempted.
pub const DENSE_QUBIT_LIMIT: usize = 12;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(dim: usize) -> Matrix {
    Matrix::identity(dim, dim)
}

pub fn dagger(m: &Matrix) -> Matrix {
    m.adjoint()
}

/// `a ⊗ b` with `a` as the outer (more significant) factor.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

pub fn pauli_x() -> Matrix {
    Matrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> Matrix {
    Matrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> Matrix {
    Matrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn unitarity_defect(m: &Matrix) -> f64 {
    let prod = m.adjoint() * m;
    max_abs_diff(&prod, &identity(m.nrows()))
}

/// Returns `(A + A†)/2`.
pub fn hermitian_part(m: &Matrix) -> Matrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Columns of the returned matrix are the corresponding orthonormal
/// eigenvectors.
pub fn eigh(m: &Matrix) -> (Vec<f64>, Matrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(m: &Matrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Rebuilds `V f(Λ) V†` from an eigendecomposition.
pub fn from_spectrum(values: &[f64], vectors: &Matrix, f: impl Fn(f64) -> C64) -> Matrix {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (k, &e) in values.iter().enumerate() {
        let w = f(e);
        for r in 0..n {
            scaled[(r, k)] *= w;
        }
    }
    scaled * vectors.adjoint()
}

/// `exp(scale · A)` for Hermitian `A`, via eigendecomposition.
pub fn expm_hermitian(a: &Matrix, scale: C64) -> Result<Matrix> {
    guard_dimension(a.nrows())?;
    let (values, vectors) = eigh(a);
    Ok(from_spectrum(&values, &vectors, |e| (scale * e).exp()))
}

/// General matrix exponential (Padé with scaling and squaring).
pub fn expm(a: &Matrix) -> Matrix {
    a.clone().exp()
}

pub fn guard_dimension(dim: usize) -> Result<()> {
    let n_qubits = dim.max(1).trailing_zeros() as usize;
    if dim > 1 << DENSE_QUBIT_LIMIT {
        return Err(QsimError::DimensionTooLarge {
            n_qubits,
            limit: DENSE_QUBIT_LIMIT,
        });
    }
    Ok(())
}

pub fn singular_values(m: &Matrix) -> Vec<f64> {
    m.clone().singular_values().iter().copied().collect()
}

/// Sum of singular values.
pub fn trace_norm(m: &Matrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Largest singular value.
pub fn spectral_norm(m: &Matrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

pub fn trace(m: &Matrix) -> C64 {
    m.trace()
}

/// Gershgorin enclosure `[lo, hi]` of the (real) spectrum of a Hermitian matrix.
pub fn gershgorin_bounds(m: &Matrix) -> (f64, f64) {
    let n = m.nrows();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let radius: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].norm()).sum();
        let centre = m[(i, i)].re;
        lo = lo.min(centre - radius);
        hi = hi.max(centre + radius);
    }
    (lo, hi)
}

/// Embeds a `k`-qubit operator acting on `support` into an `n`-qubit register.
///
/// Bit `j` of the local index corresponds to qubit `support[j]`.
pub fn embed(op: &Matrix, support: &[usize], n_qubits: usize) -> Matrix {
    let dim = 1usize << n_qubits;
    let k = support.len();
    debug_assert_eq!(op.nrows(), 1 << k);
    let mask: usize = support.iter().map(|&q| 1usize << q).sum();
    let local = |x: usize| -> usize {
        support
            .iter()
            .enumerate()
            .map(|(j, &q)| ((x >> q) & 1) << j)
            .sum()
    };
    let scatter = |base: usize, l: usize| -> usize {
        support
            .iter()
            .enumerate()
            .fold(base, |acc, (j, &q)| acc | (((l >> j) & 1) << q))
    };
    let mut out = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let base = col & !mask;
        let lc = local(col);
        for lr in 0..(1usize << k) {
            let v = op[(lr, lc)];
            if v != ZERO {
                out[(scatter(base, lr), col)] = v;
            }
        }
    }
    out
}

pub fn column_vector(v: &[C64]) -> DVector<C64> {
    DVector::from_column_slice(v)
}
