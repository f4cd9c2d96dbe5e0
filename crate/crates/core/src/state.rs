//! Pure-state register and the amplitude-update kernels.
//!
//! Qubit `q` is bit `q` of the basis index (qubit 0 is least significant).
//! For a `k`-qubit matrix applied to `targets`, bit `j` of the matrix's
//! row/column index corresponds to `targets[j]`.

use crate::dense::{self, Matrix, C64, ONE, ZERO};
use crate::error::{QsimError, Result};
use crate::operators::{GateMatrix, HermitianOperator};

const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

/// Result of a single projective measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    pub outcome: u8,
    pub probability: f64,
    /// Probability of outcome 0 before collapse.
    pub p0: f64,
    pub p1: f64,
}

impl StateVector {
    /// Computational basis state `|x⟩` on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, x: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if x >= dim {
            return Err(QsimError::IndexOutOfRange { index: x, n_qubits });
        }
        let mut amps = vec![ZERO; dim];
        amps[x] = ONE;
        Ok(Self { n_qubits, amps })
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0).expect("index 0 always valid")
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = log2_exact(amps.len())?;
        let state = Self { n_qubits, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QsimError::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn from_unnormalized(mut amps: Vec<C64>) -> Result<Self> {
        let n_qubits = log2_exact(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QsimError::InvalidArgument("cannot normalize a zero vector".into()));
        }
        let s = 1.0 / norm.sqrt();
        amps.iter_mut().for_each(|a| *a *= s);
        Ok(Self { n_qubits, amps })
    }

    /// Uniform superposition over all basis states.
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { n_qubits, amps: vec![a; dim] }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Raw mutable access; callers are responsible for keeping the norm.
    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn probability(&self, x: usize) -> f64 {
        self.amps[x].norm_sqr()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same_dim(other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product with `self` on the low qubits and `high` above them.
    pub fn tensor(&self, high: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * high.dim());
        for h in &high.amps {
            amps.extend(self.amps.iter().map(|l| l * h));
        }
        StateVector {
            n_qubits: self.n_qubits + high.n_qubits,
            amps,
        }
    }

    pub fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(QsimError::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    fn check_same_dim(&self, other: usize) -> Result<()> {
        if self.dim() != other {
            return Err(QsimError::DimensionMismatch {
                expected: self.dim(),
                found: other,
            });
        }
        Ok(())
    }

    /// Applies a (possibly controlled) gate in place.
    pub fn apply(&mut self, gate: &GateMatrix, targets: &[usize], controls: &[usize]) -> Result<()> {
        if gate.arity() != targets.len() {
            return Err(QsimError::ArityMismatch {
                arity: gate.arity(),
                targets: targets.len(),
            });
        }
        self.apply_matrix(gate.matrix(), targets, controls)
    }

    /// Applies an arbitrary `2^k × 2^k` matrix on `targets` conditioned on all
    /// `controls` being 1. No unitarity check is made.
    pub fn apply_matrix(&mut self, m: &Matrix, targets: &[usize], controls: &[usize]) -> Result<()> {
        validate_qubits(self.n_qubits, targets, controls)?;
        if m.nrows() != 1 << targets.len() || !m.is_square() {
            return Err(QsimError::ArityMismatch {
                arity: m.nrows().trailing_zeros() as usize,
                targets: targets.len(),
            });
        }
        apply_matrix_slice(&mut self.amps, m, targets, controls);
        Ok(())
    }

    /// Multiplies amplitude `x` by `phase(x)`.
    pub fn apply_diagonal(&mut self, phase: impl Fn(usize) -> C64) {
        self.amps.iter_mut().enumerate().for_each(|(x, a)| *a *= phase(x));
    }

    /// Permutes basis states: amplitude at `x` moves to `map(x)`.
    ///
    /// `map` must be a bijection on `0..dim`.
    pub fn apply_permutation(&mut self, map: impl Fn(usize) -> usize) {
        let mut out = vec![ZERO; self.dim()];
        for (x, a) in self.amps.iter().enumerate() {
            out[map(x)] = *a;
        }
        self.amps = out;
    }

    /// Swaps two qubits by relabeling amplitudes.
    pub fn swap_qubits(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Ok(());
        }
        let (ma, mb) = (1usize << a, 1usize << b);
        for x in 0..self.dim() {
            if x & ma != 0 && x & mb == 0 {
                self.amps.swap(x, (x & !ma) | mb);
            }
        }
        Ok(())
    }

    /// Probability that qubit `q` reads 1.
    pub fn prob_one(&self, q: usize) -> Result<f64> {
        self.check_qubit(q)?;
        let m = 1usize << q;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(x, _)| x & m != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projective measurement of one qubit; `sample` is uniform in `[0, 1)`.
    ///
    /// Outcome 0 is selected when `sample < p0`.
    pub fn measure_qubit(&mut self, q: usize, sample: f64) -> Result<Measurement> {
        let p1 = self.prob_one(q)?;
        let total = self.norm_sqr();
        let p1 = p1 / total;
        let p0 = 1.0 - p1;
        let outcome = u8::from(sample >= p0);
        let probability = if outcome == 0 { p0 } else { p1 };
        if probability <= 0.0 {
            return Err(QsimError::ZeroProbabilityBranch);
        }
        let m = 1usize << q;
        let keep = if outcome == 0 { 0 } else { m };
        let s = 1.0 / (probability * total).sqrt();
        for (x, a) in self.amps.iter_mut().enumerate() {
            if x & m == keep {
                *a *= s;
            } else {
                *a = ZERO;
            }
        }
        Ok(Measurement { outcome, probability, p0, p1 })
    }

    /// Marginal distribution of the integer held by `qubits` (LSB first).
    pub fn register_distribution(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let mut dist = vec![0.0; 1 << qubits.len()];
        for (x, a) in self.amps.iter().enumerate() {
            dist[gather_bits(x, qubits)] += a.norm_sqr();
        }
        Ok(dist)
    }

    /// Measures all of `qubits` at once and collapses; returns `(value, probability)`.
    pub fn measure_register(&mut self, qubits: &[usize], sample: f64) -> Result<(usize, f64)> {
        let dist = self.register_distribution(qubits)?;
        let total: f64 = dist.iter().sum();
        let value = sample_index(&dist, sample * total);
        let p = dist[value] / total;
        if p <= 0.0 {
            return Err(QsimError::ZeroProbabilityBranch);
        }
        let s = 1.0 / (p * total).sqrt();
        for (x, a) in self.amps.iter_mut().enumerate() {
            if gather_bits(x, qubits) == value {
                *a *= s;
            } else {
                *a = ZERO;
            }
        }
        Ok((value, p))
    }

    /// Projects `qubits` onto `value` and returns the normalized state of the
    /// remaining qubits (kept in ascending order) together with the branch
    /// probability.
    pub fn project_out(&self, qubits: &[usize], value: usize) -> Result<(StateVector, f64)> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let rest: Vec<usize> = (0..self.n_qubits).filter(|q| !qubits.contains(q)).collect();
        let mut amps = vec![ZERO; 1 << rest.len()];
        for (x, a) in self.amps.iter().enumerate() {
            if gather_bits(x, qubits) == value {
                amps[gather_bits(x, &rest)] = *a;
            }
        }
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>() / self.norm_sqr();
        if p <= 0.0 {
            return Err(QsimError::ZeroProbabilityBranch);
        }
        Ok((StateVector::from_unnormalized(amps)?, p))
    }

    /// Keeps the low `n` qubits, assuming the upper qubits are in the state
    /// `upper` (unentangled). Returns the low state and the overlap fidelity
    /// `‖(I ⊗ ⟨upper|)ψ‖²`.
    pub fn split_off_upper(&self, upper: &StateVector) -> Result<(StateVector, f64)> {
        let low_q = self.n_qubits.checked_sub(upper.n_qubits).ok_or(QsimError::DimensionMismatch {
            expected: self.n_qubits,
            found: upper.n_qubits,
        })?;
        let low_dim = 1usize << low_q;
        let mut amps = vec![ZERO; low_dim];
        for (h, u) in upper.amps.iter().enumerate() {
            let uc = u.conj();
            for (a, s) in amps.iter_mut().zip(&self.amps[h * low_dim..(h + 1) * low_dim]) {
                *a += uc * s;
            }
        }
        let fid: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        Ok((StateVector::from_unnormalized(amps)?, fid))
    }

    /// `⟨ψ|A|ψ⟩` with the imaginary residue discarded.
    pub fn expectation(&self, a: &HermitianOperator) -> Result<f64> {
        self.check_same_dim(a.dim())?;
        let v = dense::column_vector(&self.amps);
        let av = a.matrix() * &v;
        Ok(v.dotc(&av).re)
    }

    /// Sample of `⟨ψ|M|ψ⟩` for a general matrix.
    pub fn expectation_matrix(&self, m: &Matrix) -> Result<C64> {
        self.check_same_dim(m.nrows())?;
        let v = dense::column_vector(&self.amps);
        Ok(v.dotc(&(m * &v)))
    }

    /// Applies a full-register dense matrix.
    pub fn apply_dense(&mut self, m: &Matrix) -> Result<()> {
        self.check_same_dim(m.ncols())?;
        let v = m * dense::column_vector(&self.amps);
        self.amps.copy_from_slice(v.as_slice());
        Ok(())
    }
}

fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(QsimError::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Integer whose bit `j` is bit `qubits[j]` of `x`.
#[inline]
pub fn gather_bits(x: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | (((x >> q) & 1) << j))
}

/// Inverse of [`gather_bits`] onto a base index with those bits cleared.
#[inline]
pub fn scatter_bits(base: usize, value: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(base, |acc, (j, &q)| acc | (((value >> j) & 1) << q))
}

/// Index drawn from unnormalized weights with threshold `u ∈ [0, Σw)`.
pub fn sample_index(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_nonzero = i;
        }
        acc += w;
        if u < acc && w > 0.0 {
            return i;
        }
    }
    last_nonzero
}

pub(crate) fn validate_qubits(n_qubits: usize, targets: &[usize], controls: &[usize]) -> Result<()> {
    let mut seen = 0u128;
    for &q in targets.iter().chain(controls) {
        if q >= n_qubits {
            return Err(QsimError::QubitOutOfRange { qubit: q, n_qubits });
        }
        if seen & (1 << q) != 0 {
            return Err(QsimError::OverlappingQubits(q));
        }
        seen |= 1 << q;
    }
    Ok(())
}

/// Core update kernel over a raw amplitude slice.
///
/// Indices must already be validated.
pub fn apply_matrix_slice(amps: &mut [C64], m: &Matrix, targets: &[usize], controls: &[usize]) {
    let cmask: usize = controls.iter().map(|&q| 1usize << q).sum();
    if targets.len() == 1 {
        let (u00, u01, u10, u11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let stride = 1usize << targets[0];
        let dim = amps.len();
        let mut block = 0;
        while block < dim {
            for i in block..block + stride {
                if i & cmask != cmask {
                    continue;
                }
                let a0 = amps[i];
                let a1 = amps[i + stride];
                amps[i] = u00 * a0 + u01 * a1;
                amps[i + stride] = u10 * a0 + u11 * a1;
            }
            block += 2 * stride;
        }
        return;
    }
    let k = targets.len();
    let size = 1usize << k;
    let tmask: usize = targets.iter().map(|&q| 1usize << q).sum();
    let offsets: Vec<usize> = (0..size).map(|l| scatter_bits(0, l, targets)).collect();
    let mut buf = vec![ZERO; size];
    for base in 0..amps.len() {
        if base & tmask != 0 || base & cmask != cmask {
            continue;
        }
        for (l, off) in offsets.iter().enumerate() {
            buf[l] = amps[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, b) in buf.iter().enumerate() {
                acc += m[(r, c)] * b;
            }
            amps[base | off] = acc;
        }
    }
}

/// Applies the kernel to every column of a dense matrix (i.e. left-multiplies
/// by the embedded operator).
pub fn apply_matrix_columns(target: &mut Matrix, m: &Matrix, targets: &[usize], controls: &[usize]) {
    for c in 0..target.ncols() {
        apply_matrix_slice(target.column_mut(c).as_mut_slice(), m, targets, controls);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{standard_gate, StandardGate};
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_states() {
        assert_eq!(StateVector::basis(1, 0).unwrap().amplitudes(), &[ONE, ZERO]);
        assert_eq!(StateVector::basis(2, 3).unwrap().amplitudes(), &[ZERO, ZERO, ZERO, ONE]);
        let s = StateVector::basis(3, 5).unwrap();
        assert_eq!(s.probability(0b101), 1.0);
        assert!(matches!(
            StateVector::basis(2, 4),
            Err(QsimError::IndexOutOfRange { index: 4, n_qubits: 2 })
        ));
    }

    #[test]
    fn hadamard_then_cnot_makes_bell_pair() {
        let h = standard_gate(StandardGate::H).unwrap();
        let x = standard_gate(StandardGate::X).unwrap();
        let mut s = StateVector::zero(2);
        s.apply(&h, &[0], &[]).unwrap();
        s.apply(&x, &[1], &[0]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitudes()[0].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[3].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].norm(), 0.0);
    }

    #[test]
    fn inactive_control_leaves_state() {
        let ry = standard_gate(StandardGate::Ry(0.7)).unwrap();
        let mut s = StateVector::basis(2, 0b10).unwrap();
        let before = s.clone();
        s.apply(&ry, &[1], &[0]).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn overlapping_and_arity_errors() {
        let x = standard_gate(StandardGate::X).unwrap();
        let cnot = standard_gate(StandardGate::Cnot).unwrap();
        let mut s = StateVector::zero(2);
        assert_eq!(s.apply(&x, &[0], &[0]), Err(QsimError::OverlappingQubits(0)));
        assert!(matches!(s.apply(&cnot, &[0], &[]), Err(QsimError::ArityMismatch { .. })));
        assert!(matches!(s.apply(&x, &[2], &[]), Err(QsimError::QubitOutOfRange { .. })));
    }

    #[test]
    fn measurement_rules() {
        let mut s = StateVector::zero(1);
        let m = s.measure_qubit(0, 0.3).unwrap();
        assert_eq!((m.outcome, m.probability), (0, 1.0));

        let mut plus = StateVector::uniform(1);
        let m = plus.measure_qubit(0, 0.9).unwrap();
        assert_abs_diff_eq!(m.p0, 0.5, epsilon = 1e-15);
        assert_eq!(m.outcome, 1);

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut bell = StateVector::from_amplitudes(vec![
            C64::new(r, 0.0),
            ZERO,
            ZERO,
            C64::new(r, 0.0),
        ])
        .unwrap();
        let m = bell.measure_qubit(1, 0.75).unwrap();
        assert_eq!(m.outcome, 1);
        assert_abs_diff_eq!(bell.probability(3), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn project_out_keeps_remaining_order() {
        // |q2 q1 q0> = |1 0 1>
        let s = StateVector::basis(3, 0b101).unwrap();
        let (rest, p) = s.project_out(&[1], 0).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(rest.probability(0b11), 1.0);
        assert_eq!(s.project_out(&[1], 1), Err(QsimError::ZeroProbabilityBranch));
    }

    #[test]
    fn general_kernel_matches_embedding() {
        let cnot = standard_gate(StandardGate::Cnot).unwrap();
        let mut psi = StateVector::from_unnormalized(
            (0..8).map(|k| C64::new(k as f64 + 0.5, -(k as f64) * 0.2)).collect(),
        )
        .unwrap();
        let mut expected = psi.clone();
        psi.apply(&cnot, &[2, 0], &[]).unwrap();
        expected
            .apply_dense(&dense::embed(cnot.matrix(), &[2, 0], 3))
            .unwrap();
        for (a, b) in psi.amplitudes().iter().zip(expected.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
