//! Small reference Hamiltonians used by examples and experiments.

use crate::error::{QsimError, Result};
use crate::operators::HermitianOperator;

/// Open transverse-field Ising chain `−J Σ Z_i Z_{i+1} − h Σ X_i`.
pub fn transverse_ising(n_qubits: usize, j: f64, h: f64) -> Result<HermitianOperator> {
    if n_qubits == 0 {
        return Err(QsimError::InvalidArgument("Ising chain needs at least one site".into()));
    }
    let mut total = HermitianOperator::zeros(n_qubits);
    let zz = HermitianOperator::pauli_z().kron(&HermitianOperator::pauli_z());
    for i in 0..n_qubits.saturating_sub(1) {
        total = total.plus(&zz.embed(&[i, i + 1], n_qubits)?.scaled(-j))?;
    }
    for i in 0..n_qubits {
        total = total.plus(&HermitianOperator::pauli_x().embed(&[i], n_qubits)?.scaled(-h))?;
    }
    Ok(total)
}

/// `Σ_i coeff · P_i` for a single-qubit operator `P` on every site.
pub fn uniform_field(n_qubits: usize, p: &HermitianOperator, coeff: f64) -> Result<HermitianOperator> {
    let mut total = HermitianOperator::zeros(n_qubits);
    for i in 0..n_qubits {
        total = total.plus(&p.embed(&[i], n_qubits)?.scaled(coeff))?;
    }
    Ok(total)
}
