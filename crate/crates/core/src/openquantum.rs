//! Lindblad generators as dense superoperators and split channels.
//!
//! Density matrices are vectorized by stacking columns, so
//! `vec(AXB) = (Bᵀ ⊗ A) vec(X)`. The generator is
//!
//! ```text
//! L(ρ) = −i[H, ρ] + Σ_ab m_ab ([Λ_a ρ, Λ_b†] + [Λ_a, ρ Λ_b†])
//! ```
//!
//! which expands to `Σ m_ab (2 Λ_a ρ Λ_b† − {Λ_b† Λ_a, ρ})`.

use rayon::prelude::*;

use crate::dense::{self, Matrix, C64, I, ONE, ZERO};
use crate::error::{QsimError, Result};
use crate::operators::{DensityMatrix, HermitianOperator};

/// Largest register for which superoperators are built (`D ≤ 32`).
pub const LINDBLAD_QUBIT_LIMIT: usize = 5;

const PSD_TOL: f64 = 1e-10;
const TRACELESS_TOL: f64 = 1e-12;
/// Tolerance for trace preservation of channels.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest admissible Choi eigenvalue.
pub const CHOI_TOL: f64 = -1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct LindbladModel {
    hamiltonian: HermitianOperator,
    rates: Matrix,
    operators: Vec<Matrix>,
}

impl LindbladModel {
    /// Validates `m ⪰ 0` and that every `Λ` is traceless and of matching size.
    pub fn new(hamiltonian: HermitianOperator, rates: Matrix, operators: Vec<Matrix>) -> Result<Self> {
        if hamiltonian.n_qubits() > LINDBLAD_QUBIT_LIMIT {
            return Err(QsimError::DimensionTooLarge { n_qubits: hamiltonian.n_qubits(), limit: LINDBLAD_QUBIT_LIMIT });
        }
        let d = hamiltonian.dim();
        let k = operators.len();
        if rates.nrows() != k || rates.ncols() != k {
            return Err(QsimError::DimensionMismatch { expected: k, found: rates.nrows().max(rates.ncols()) });
        }
        for op in &operators {
            if op.nrows() != d || op.ncols() != d {
                return Err(QsimError::DimensionMismatch { expected: d, found: op.nrows() });
            }
            let tr = op.trace().norm();
            if tr > TRACELESS_TOL {
                return Err(QsimError::InvalidArgument(format!("jump operator has trace {tr:.3e}")));
            }
        }
        if k > 0 {
            let herm = dense::hermiticity_defect(&rates);
            if herm > PSD_TOL {
                return Err(QsimError::InvalidArgument(format!("rate matrix not Hermitian ({herm:.3e})")));
            }
            let min = dense::eigvalsh(&rates)[0];
            if min < -PSD_TOL {
                return Err(QsimError::InvalidArgument(format!("rate matrix has eigenvalue {min:.3e}")));
            }
        }
        Ok(Self { hamiltonian, rates, operators })
    }

    pub fn closed(hamiltonian: HermitianOperator) -> Self {
        Self { hamiltonian, rates: Matrix::zeros(0, 0), operators: Vec::new() }
    }

    /// Diagonal rates: `Σ_a r_a D[Λ_a]`.
    pub fn diagonal(hamiltonian: HermitianOperator, rates: &[f64], operators: Vec<Matrix>) -> Result<Self> {
        let m = Matrix::from_fn(rates.len(), rates.len(), |i, j| if i == j { C64::new(rates[i], 0.0) } else { ZERO });
        Self::new(hamiltonian, m, operators)
    }

    /// `Λ = σᶻ/√2` on one qubit of an `n`-qubit register with rate `γ`;
    /// coherences across that qubit decay at rate `2γ`.
    pub fn dephasing(n_qubits: usize, qubit: usize, rate: f64) -> Result<Self> {
        let z = HermitianOperator::pauli_z().scaled(std::f64::consts::FRAC_1_SQRT_2).embed(&[qubit], n_qubits)?;
        Self::diagonal(HermitianOperator::zeros(n_qubits), &[rate], vec![z.into_matrix()])
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn rates(&self) -> &Matrix {
        &self.rates
    }

    pub fn operators(&self) -> &[Matrix] {
        &self.operators
    }

    /// `(H only, dissipator only)`.
    pub fn split(&self) -> (LindbladModel, LindbladModel) {
        let h = Self::closed(self.hamiltonian.clone());
        let d = Self {
            hamiltonian: HermitianOperator::zeros(self.n_qubits()),
            rates: self.rates.clone(),
            operators: self.operators.clone(),
        };
        (h, d)
    }
}

/// The generator as a `D² × D²` matrix on column-stacked density matrices.
pub fn build_lindbladian(model: &LindbladModel) -> Matrix {
    let d = model.dim();
    let id = dense::identity(d);
    let h = model.hamiltonian.matrix();
    let mut l = (dense::kron(&id, h) - dense::kron(&h.transpose(), &id)) * (-I);
    for (a, la) in model.operators.iter().enumerate() {
        for (b, lb) in model.operators.iter().enumerate() {
            let m = model.rates[(a, b)];
            if m == ZERO {
                continue;
            }
            let lb_dag = lb.adjoint();
            let prod = &lb_dag * la;
            let jump = dense::kron(&lb.conjugate(), la) * C64::new(2.0, 0.0);
            let anti = dense::kron(&id, &prod) + dense::kron(&prod.transpose(), &id);
            l += (jump - anti) * m;
        }
    }
    l
}

/// `ρ(t) = e^{tL} ρ₀`, re-validated as a density matrix.
pub fn propagate_exact(model: &LindbladModel, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    ChannelMatrix::exact(model, t)?.apply(rho0)
}

/// One point of a sampled trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub populations: Vec<f64>,
    /// Largest off-diagonal magnitude.
    pub coherence: f64,
    pub trace: f64,
}

/// Exact propagation to each time, evaluated in parallel.
pub fn trajectory(model: &LindbladModel, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<TrajectoryPoint>> {
    let l = build_lindbladian(model);
    times
        .par_iter()
        .map(|&t| {
            let rho = ChannelMatrix::from_generator(&l, t)?.apply(rho0)?;
            let m = rho.matrix();
            let d = m.nrows();
            let mut coherence: f64 = 0.0;
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        coherence = coherence.max(m[(i, j)].norm());
                    }
                }
            }
            Ok(TrajectoryPoint {
                time: t,
                populations: (0..d).map(|i| m[(i, i)].re).collect(),
                coherence,
                trace: m.trace().re,
            })
        })
        .collect()
}

/// A linear map on column-stacked `D × D` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMatrix {
    dim: usize,
    matrix: Matrix,
}

impl ChannelMatrix {
    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: dense::identity(dim * dim) }
    }

    fn from_generator(l: &Matrix, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(QsimError::NonFiniteParameter(format!("t = {t}")));
        }
        let dim = (l.nrows() as f64).sqrt().round() as usize;
        Ok(Self { dim, matrix: dense::expm(&(l * C64::new(t, 0.0))) })
    }

    /// `e^{tL}` for the model's generator.
    pub fn exact(model: &LindbladModel, t: f64) -> Result<Self> {
        Self::from_generator(&build_lindbladian(model), t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &ChannelMatrix) -> Result<Self> {
        if self.dim != first.dim {
            return Err(QsimError::DimensionMismatch { expected: self.dim, found: first.dim });
        }
        Ok(Self { dim: self.dim, matrix: &self.matrix * &first.matrix })
    }

    /// Applies the channel and validates the output.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(QsimError::DimensionMismatch { expected: self.dim, found: rho.dim() });
        }
        let out = &self.matrix * rho.vectorize();
        DensityMatrix::from_vectorized(&out).map_err(|e| QsimError::Numerical(format!("channel output invalid: {e}")))
    }

    /// `max_X |Tr K(X) − Tr X|` over matrix units `X = |i⟩⟨j|`.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for col in 0..d * d {
            let (i, j) = (col % d, col / d);
            let tr: C64 = (0..d).map(|k| self.matrix[(k * d + k, col)]).sum();
            let want = if i == j { ONE } else { ZERO };
            worst = worst.max((tr - want).norm());
        }
        worst
    }

    /// `Σ_ij |i⟩⟨j| ⊗ K(|i⟩⟨j|)`, with the input index as the outer factor.
    pub fn choi(&self) -> Matrix {
        let d = self.dim;
        let mut c = Matrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let col = j * d + i;
                for r in 0..d {
                    for s in 0..d {
                        c[(i * d + r, j * d + s)] = self.matrix[(s * d + r, col)];
                    }
                }
            }
        }
        c
    }

    /// Smallest eigenvalue of the (Hermitian part of the) Choi matrix.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        dense::eigvalsh(&dense::hermitian_part(&self.choi()))[0]
    }

    pub fn is_valid_channel(&self) -> bool {
        self.trace_defect() <= TRACE_TOL && self.choi_min_eigenvalue() >= CHOI_TOL
    }

    /// Largest singular value of the difference of the two superoperators.
    pub fn distance(&self, other: &ChannelMatrix) -> Result<f64> {
        if self.dim != other.dim {
            return Err(QsimError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(dense::spectral_norm(&(&self.matrix - &other.matrix)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    /// `K_m(Δt) ⋯ K_1(Δt)` per step.
    FirstOrder,
    /// `K_1(Δt/2) ⋯ K_m(Δt) ⋯ K_1(Δt/2)` per step.
    Strang,
}

/// Channel for total time `steps · dt` built from the factors `e^{Δt L_i}`.
pub fn trotterized_channel(models: &[LindbladModel], dt: f64, steps: usize, splitting: Splitting) -> Result<ChannelMatrix> {
    let first = models.first().ok_or_else(|| QsimError::InvalidArgument("no generators to split".into()))?;
    if let Some(m) = models.iter().find(|m| m.dim() != first.dim()) {
        return Err(QsimError::DimensionMismatch { expected: first.dim(), found: m.dim() });
    }
    let gens: Vec<Matrix> = models.iter().map(build_lindbladian).collect();
    let step = match splitting {
        Splitting::FirstOrder => {
            let mut k = ChannelMatrix::identity(first.dim());
            for g in &gens {
                k = ChannelMatrix::from_generator(g, dt)?.after(&k)?;
            }
            k
        }
        Splitting::Strang => {
            let last = gens.len() - 1;
            let half: Vec<ChannelMatrix> = gens[..last].iter().map(|g| ChannelMatrix::from_generator(g, dt / 2.0)).collect::<Result<_>>()?;
            let mut k = ChannelMatrix::identity(first.dim());
            for h in &half {
                k = h.after(&k)?;
            }
            k = ChannelMatrix::from_generator(&gens[last], dt)?.after(&k)?;
            for h in half.iter().rev() {
                k = h.after(&k)?;
            }
            k
        }
    };
    let mut total = ChannelMatrix::identity(first.dim());
    let mut power = step;
    let mut e = steps;
    while e > 0 {
        if e & 1 == 1 {
            total = power.after(&total)?;
        }
        e >>= 1;
        if e > 0 {
            power = power.after(&power)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sigma_minus() -> Matrix {
        Matrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
    }

    fn plus_state() -> DensityMatrix {
        DensityMatrix::from_pure(&crate::state::StateVector::uniform(1))
    }

    #[test]
    fn validation() {
        let h = HermitianOperator::zeros(1);
        assert!(LindbladModel::diagonal(h.clone(), &[-0.1], vec![dense::pauli_z()]).is_err());
        assert!(LindbladModel::diagonal(h.clone(), &[0.1], vec![dense::identity(2)]).is_err());
        assert!(LindbladModel::diagonal(h.clone(), &[0.1, 0.2], vec![dense::pauli_z()]).is_err());
        assert!(LindbladModel::diagonal(h, &[0.1], vec![sigma_minus()]).is_ok());
    }

    #[test]
    fn closed_system_is_unitary_conjugation() {
        let h = HermitianOperator::pauli_x().scaled(0.8);
        let rho0 = DensityMatrix::from_pure(&crate::state::StateVector::zero(1));
        let rho = propagate_exact(&LindbladModel::closed(h.clone()), &rho0, 1.3).unwrap();
        let u = h.exp(C64::new(0.0, -1.3)).unwrap();
        let want = &u * rho0.matrix() * u.adjoint();
        assert!(dense::max_abs_diff(rho.matrix(), &want) < 1e-10);
        assert_eq!(propagate_exact(&LindbladModel::closed(h), &rho0, 0.0).unwrap(), rho0);
    }

    #[test]
    fn dephasing_rate_and_fixed_points() {
        let gamma = 0.3;
        let model = LindbladModel::dephasing(1, 0, gamma).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let rho = propagate_exact(&model, &plus_state(), t).unwrap();
            assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(rho.matrix()[(0, 1)].re, 0.5 * (-2.0 * gamma * t).exp(), epsilon = 1e-12);
            assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
        }
        let diag = DensityMatrix::new(Matrix::from_row_slice(2, 2, &[C64::new(0.3, 0.0), ZERO, ZERO, C64::new(0.7, 0.0)])).unwrap();
        let l = build_lindbladian(&model);
        assert!((&l * diag.vectorize()).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn generator_is_trace_free_on_mixed_state() {
        let model = LindbladModel::diagonal(HermitianOperator::zeros(1), &[0.4], vec![sigma_minus()]).unwrap();
        let d = build_lindbladian(&model) * DensityMatrix::maximally_mixed(1).vectorize();
        assert!((d[0] + d[3]).norm() < 1e-15);
    }

    #[test]
    fn exact_channel_properties() {
        let model = LindbladModel::diagonal(HermitianOperator::pauli_x().scaled(0.5), &[0.4], vec![sigma_minus()]).unwrap();
        let k = ChannelMatrix::exact(&model, 0.7).unwrap();
        assert!(k.trace_defect() < 1e-12);
        assert!(k.choi_min_eigenvalue() > CHOI_TOL);
        // identity channel's Choi matrix is the unnormalized Bell projector
        let id = ChannelMatrix::identity(2).choi();
        assert_abs_diff_eq!(dense::eigvalsh(&id)[3], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn single_model_split_is_exact() {
        let model = LindbladModel::diagonal(HermitianOperator::pauli_z(), &[0.2], vec![sigma_minus()]).unwrap();
        let split = trotterized_channel(std::slice::from_ref(&model), 0.1, 10, Splitting::FirstOrder).unwrap();
        let exact = ChannelMatrix::exact(&model, 1.0).unwrap();
        assert!(split.distance(&exact).unwrap() < 1e-10);
    }

    #[test]
    fn strang_beats_first_order() {
        let model = LindbladModel::diagonal(HermitianOperator::pauli_x(), &[0.5], vec![sigma_minus()]).unwrap();
        let (h, d) = model.split();
        let exact = ChannelMatrix::exact(&model, 1.0).unwrap();
        let e1 = trotterized_channel(&[h.clone(), d.clone()], 0.05, 20, Splitting::FirstOrder).unwrap().distance(&exact).unwrap();
        let e2 = trotterized_channel(&[h, d], 0.05, 20, Splitting::Strang).unwrap().distance(&exact).unwrap();
        assert!(e2 < e1 / 5.0, "{e1} {e2}");
        assert!(trotterized_channel(&[], 0.1, 1, Splitting::FirstOrder).is_err());
    }
}
