//! Fidelity and trace distance.

use crate::dense::{self, Matrix, C64};
use crate::error::{QsimError, Result};
use crate::operators::DensityMatrix;
use crate::state::StateVector;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateMetrics {
    pub fidelity: f64,
    pub trace_distance: f64,
}

/// Metrics between two pure states. The trace distance is
/// `½‖|a⟩⟨a| − |b⟩⟨b|‖_Tr`, which for pure states is `√(1 − F)`.
pub fn state_metrics(a: &StateVector, b: &StateVector) -> Result<StateMetrics> {
    let fidelity = fidelity(a, b)?;
    Ok(StateMetrics { fidelity, trace_distance: (1.0 - fidelity).max(0.0).sqrt() })
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Metrics between two density matrices (Uhlmann fidelity).
pub fn density_metrics(a: &DensityMatrix, b: &DensityMatrix) -> Result<StateMetrics> {
    Ok(StateMetrics {
        fidelity: uhlmann_fidelity(a, b)?,
        trace_distance: trace_distance(a, b)?,
    })
}

/// `½‖ρ − σ‖_Tr`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check(a.dim(), b.dim())?;
    let diff = a.matrix() - b.matrix();
    // The difference is Hermitian: its singular values are |eigenvalues|.
    Ok(0.5 * dense::eigvalsh(&diff).iter().map(|e| e.abs()).sum::<f64>())
}

/// `(Tr √(√ρ σ √ρ))²`.
pub fn uhlmann_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check(a.dim(), b.dim())?;
    let (vals, vecs) = dense::eigh(a.matrix());
    let sqrt_a: Matrix = dense::from_spectrum(&vals, &vecs, |e| C64::new(e.max(0.0).sqrt(), 0.0));
    let inner = &sqrt_a * b.matrix() * &sqrt_a;
    let s: f64 = dense::eigvalsh(&inner).iter().map(|e| e.max(0.0).sqrt()).sum();
    Ok((s * s).min(1.0))
}

fn check(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(QsimError::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pure_examples() {
        let zero = StateVector::zero(1);
        let one = StateVector::basis(1, 1).unwrap();
        let plus = StateVector::uniform(1);
        let m = state_metrics(&zero, &zero).unwrap();
        assert_abs_diff_eq!(m.fidelity, 1.0);
        assert_abs_diff_eq!(m.trace_distance, 0.0);
        let m = state_metrics(&zero, &one).unwrap();
        assert_abs_diff_eq!(m.fidelity, 0.0);
        assert_abs_diff_eq!(m.trace_distance, 1.0);
        assert_abs_diff_eq!(fidelity(&zero, &plus).unwrap(), 0.5, epsilon = 1e-15);
        assert!(fidelity(&zero, &StateVector::zero(2)).is_err());
    }

    #[test]
    fn pure_closed_form_matches_density_route() {
        let a = StateVector::from_unnormalized(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.9)]).unwrap();
        let b = StateVector::from_unnormalized(vec![C64::new(1.0, 0.0), C64::new(0.4, -0.4)]).unwrap();
        let pure = state_metrics(&a, &b).unwrap();
        let mixed = density_metrics(&DensityMatrix::from_pure(&a), &DensityMatrix::from_pure(&b)).unwrap();
        assert_abs_diff_eq!(pure.fidelity, mixed.fidelity, epsilon = 1e-7);
        assert_abs_diff_eq!(pure.trace_distance, mixed.trace_distance, epsilon = 1e-12);
    }
}
