//! Quantum Fourier transform, phase estimation and ground-state projection.

use std::f64::consts::PI;

use crate::circuit::Circuit;
use crate::dense::{self, Matrix, C64};
use crate::error::{QsimError, Result};
use crate::gates::{standard_gate, StandardGate};
use crate::operators::HermitianOperator;
use crate::state::StateVector;

/// QFT circuit on `n` local qubits (local qubit 0 is the least significant).
///
/// `|x⟩ → N^{-1/2} Σ_k e^{2πixk/N} |k⟩`, built from `n` Hadamards,
/// `n(n−1)/2` controlled phases and `⌊n/2⌋` swaps.
pub fn qft_circuit(n: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    for j in (0..n).rev() {
        c.push_standard(StandardGate::H, &[j], &[])?;
        for k in (0..j).rev() {
            // controlled R_{j-k+1}^†, i.e. phase e^{+2πi/2^{j-k+1}}
            let angle = 2.0 * PI / 2f64.powi((j - k + 1) as i32);
            c.push_standard(StandardGate::Phase(angle), &[j], &[k])?;
        }
    }
    for j in 0..n / 2 {
        c.push_standard(StandardGate::Swap, &[j, n - 1 - j], &[])?;
    }
    Ok(c)
}

pub fn inverse_qft_circuit(n: usize) -> Result<Circuit> {
    Ok(qft_circuit(n)?.inverse())
}

fn check_distinct(state: &StateVector, qubits: &[usize]) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        state.check_qubit(q)?;
        if qubits[..i].contains(&q) {
            return Err(QsimError::OverlappingQubits(q));
        }
    }
    Ok(())
}

/// Fourier transform of the sub-register `qubits` (`qubits[0]` least significant).
pub fn qft(state: &mut StateVector, qubits: &[usize]) -> Result<()> {
    check_distinct(state, qubits)?;
    qft_circuit(qubits.len())?.apply(state, qubits)
}

pub fn inverse_qft(state: &mut StateVector, qubits: &[usize]) -> Result<()> {
    check_distinct(state, qubits)?;
    inverse_qft_circuit(qubits.len())?.apply(state, qubits)
}

/// Ancillas needed for `p` bits of phase with failure probability at most `epsilon`:
/// `p + ⌈log₂(2 + 1/(2ε))⌉`.
pub fn ancilla_budget(p: usize, epsilon: f64) -> Result<usize> {
    if p == 0 {
        return Err(QsimError::InvalidArgument("precision p must be at least 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(QsimError::InvalidArgument(format!("failure probability must lie in (0, 1), got {epsilon}")));
    }
    let extra = (2.0 + 1.0 / (2.0 * epsilon)).log2().ceil() as usize;
    Ok(p + extra)
}

/// Source of controlled powers `W^{2^j}` for phase estimation.
pub trait ControlledPowers {
    /// Size of the register `W` acts on.
    fn register_qubits(&self) -> usize;

    /// Applies `W^{2^j}` to `register` conditioned on `control`.
    fn apply_controlled_power(&self, state: &mut StateVector, control: usize, register: &[usize], j: u32) -> Result<()>;
}

/// Dense unitary whose powers are obtained by repeated squaring.
#[derive(Clone, Debug)]
pub struct DenseUnitary {
    powers: Vec<Matrix>,
}

impl DenseUnitary {
    /// Precomputes `W^{2^j}` for `j < max_power`.
    pub fn new(w: Matrix, max_power: u32) -> Result<Self> {
        let defect = dense::unitarity_defect(&w);
        if defect > 1e-8 {
            return Err(QsimError::NotUnitary(defect));
        }
        let mut powers = Vec::with_capacity(max_power as usize);
        let mut cur = w;
        for _ in 0..max_power {
            let next = &cur * &cur;
            powers.push(cur);
            cur = next;
        }
        Ok(Self { powers })
    }

    pub fn power(&self, j: u32) -> Option<&Matrix> {
        self.powers.get(j as usize)
    }
}

impl ControlledPowers for DenseUnitary {
    fn register_qubits(&self) -> usize {
        self.powers.first().map_or(0, |m| m.nrows().trailing_zeros() as usize)
    }

    fn apply_controlled_power(&self, state: &mut StateVector, control: usize, register: &[usize], j: u32) -> Result<()> {
        let m = self
            .power(j)
            .ok_or_else(|| QsimError::InvalidArgument(format!("power 2^{j} was not precomputed")))?;
        state.apply_matrix(m, register, &[control])
    }
}

/// Circuit-faithful powers: a callback applying controlled-`W` once is
/// invoked `2^j` times.
pub struct RepeatedApplication<F> {
    register_qubits: usize,
    apply_once: F,
}

impl<F> RepeatedApplication<F>
where
    F: Fn(&mut StateVector, usize, &[usize]) -> Result<()>,
{
    pub fn new(register_qubits: usize, apply_once: F) -> Self {
        Self { register_qubits, apply_once }
    }
}

impl<F> ControlledPowers for RepeatedApplication<F>
where
    F: Fn(&mut StateVector, usize, &[usize]) -> Result<()>,
{
    fn register_qubits(&self) -> usize {
        self.register_qubits
    }

    fn apply_controlled_power(&self, state: &mut StateVector, control: usize, register: &[usize], j: u32) -> Result<()> {
        for _ in 0..(1u64 << j) {
            (self.apply_once)(state, control, register)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseEstimate {
    /// Integer read from the ancilla register.
    pub register_outcome: usize,
    /// `register_outcome / 2^m`, in cycles.
    pub phase: f64,
    pub probability: f64,
}

#[derive(Clone, Debug)]
pub struct PeaOutcome {
    pub estimate: PhaseEstimate,
    /// Post-measurement state of the eigen-register.
    pub register: StateVector,
}

/// Runs the estimation circuit up to (but excluding) the ancilla measurement.
/// The register occupies the low qubits, the `m` ancillas sit above it.
pub fn phase_estimation_state(oracle: &impl ControlledPowers, register: &StateVector, m: usize) -> Result<StateVector> {
    if m == 0 {
        return Err(QsimError::InvalidArgument("phase estimation needs at least one ancilla".into()));
    }
    let n = register.n_qubits();
    if oracle.register_qubits() != n {
        return Err(QsimError::DimensionMismatch { expected: oracle.register_qubits(), found: n });
    }
    let mut state = register.tensor(&StateVector::zero(m));
    let reg: Vec<usize> = (0..n).collect();
    let anc: Vec<usize> = (n..n + m).collect();
    let h = standard_gate(StandardGate::H)?;
    for &a in &anc {
        state.apply(&h, &[a], &[])?;
    }
    let norm_before = state.norm_sqr();
    for (j, &a) in anc.iter().enumerate() {
        oracle.apply_controlled_power(&mut state, a, &reg, j as u32)?;
    }
    let drift = (state.norm_sqr() - norm_before).abs();
    if drift > 1e-8 {
        return Err(QsimError::Numerical(format!("controlled power is not unitary (norm drift {drift:.3e})")));
    }
    inverse_qft(&mut state, &anc)?;
    Ok(state)
}

/// Outcome distribution over the `2^m` ancilla readings.
pub fn phase_distribution(oracle: &impl ControlledPowers, register: &StateVector, m: usize) -> Result<Vec<f64>> {
    let state = phase_estimation_state(oracle, register, m)?;
    let n = register.n_qubits();
    state.register_distribution(&(n..n + m).collect::<Vec<_>>())
}

/// Full phase estimation with a single uniform sample for the readout.
pub fn phase_estimation(oracle: &impl ControlledPowers, register: &StateVector, m: usize, sample: f64) -> Result<PeaOutcome> {
    let mut state = phase_estimation_state(oracle, register, m)?;
    let n = register.n_qubits();
    let anc: Vec<usize> = (n..n + m).collect();
    let (value, probability) = state.measure_register(&anc, sample)?;
    let (post, _) = state.project_out(&anc, value)?;
    Ok(PeaOutcome {
        estimate: PhaseEstimate {
            register_outcome: value,
            phase: value as f64 / (1u64 << m) as f64,
            probability,
        },
        register: post,
    })
}

/// Anything that can produce (a dense matrix of) `e^{-iHt}` and bound its spectrum.
pub trait Evolution {
    fn n_qubits(&self) -> usize;
    fn unitary(&self, t: f64) -> Result<Matrix>;
    /// Guaranteed enclosure `[lo, hi]` of the spectrum.
    fn spectral_bounds(&self) -> (f64, f64);
}

impl Evolution for HermitianOperator {
    fn n_qubits(&self) -> usize {
        HermitianOperator::n_qubits(self)
    }

    fn unitary(&self, t: f64) -> Result<Matrix> {
        self.exp(C64::new(0.0, -t))
    }

    fn spectral_bounds(&self) -> (f64, f64) {
        self.gershgorin_bounds()
    }
}

/// Affine map between energies and phases.
///
/// The register is evolved under `W = e^{+i(H − lo)τ}` with
/// `τ = 2π(1 − 2^{−m})/(hi − lo)`, so every eigenphase lands in
/// `[0, 1 − 2^{−m}]` without wrapping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralMap {
    pub lo: f64,
    pub hi: f64,
    pub tau: f64,
    pub m: usize,
}

impl SpectralMap {
    pub fn new(lo: f64, hi: f64, m: usize) -> Self {
        let width = if hi - lo > 1e-12 { hi - lo } else { 1.0 };
        let tau = 2.0 * PI * (1.0 - 2f64.powi(-(m as i32))) / width;
        Self { lo, hi: lo + width, tau, m }
    }

    pub fn phase_of(&self, energy: f64) -> f64 {
        (energy - self.lo) * self.tau / (2.0 * PI)
    }

    pub fn energy_of_phase(&self, phase: f64) -> f64 {
        self.lo + 2.0 * PI * phase / self.tau
    }

    pub fn decode(&self, outcome: usize) -> f64 {
        self.energy_of_phase(outcome as f64 / (1u64 << self.m) as f64)
    }

    /// Energy spacing of adjacent register outcomes.
    pub fn resolution(&self) -> f64 {
        self.energy_of_phase(1.0 / (1u64 << self.m) as f64) - self.lo
    }

    /// The phase-estimation oracle `e^{+i(H − lo)τ}` from an evolution.
    pub fn oracle(&self, evolver: &impl Evolution) -> Result<DenseUnitary> {
        let mut w = evolver.unitary(-self.tau)?;
        // remove the e^{-i lo τ} global phase carried by the shift
        w *= C64::from_polar(1.0, -self.lo * self.tau);
        DenseUnitary::new(w, self.m as u32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyWindow {
    pub lo: f64,
    pub hi: f64,
}

impl EnergyWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(QsimError::InvalidArgument(format!("empty energy window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, e: f64) -> bool {
        e >= self.lo && e <= self.hi
    }
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub accepted: bool,
    pub state: StateVector,
    pub energy: f64,
    pub estimate: PhaseEstimate,
}

/// Phase-estimation projector onto a low-energy window.
pub struct GroundStateProjector {
    map: SpectralMap,
    oracle: DenseUnitary,
}

impl GroundStateProjector {
    pub fn new(evolver: &impl Evolution, m: usize) -> Result<Self> {
        let (lo, hi) = evolver.spectral_bounds();
        Self::with_bounds(evolver, m, lo, hi)
    }

    pub fn with_bounds(evolver: &impl Evolution, m: usize, lo: f64, hi: f64) -> Result<Self> {
        let map = SpectralMap::new(lo, hi, m);
        let oracle = map.oracle(evolver)?;
        Ok(Self { map, oracle })
    }

    pub fn map(&self) -> &SpectralMap {
        &self.map
    }

    pub fn oracle(&self) -> &DenseUnitary {
        &self.oracle
    }

    pub fn project(&self, trial: &StateVector, window: EnergyWindow, sample: f64) -> Result<Projection> {
        let out = phase_estimation(&self.oracle, trial, self.map.m, sample)?;
        let energy = self.map.decode(out.estimate.register_outcome);
        Ok(Projection { accepted: window.contains(energy), state: out.register, energy, estimate: out.estimate })
    }

    /// Probability of acceptance computed from the exact outcome distribution.
    pub fn acceptance_probability(&self, trial: &StateVector, window: EnergyWindow) -> Result<f64> {
        let dist = phase_distribution(&self.oracle, trial, self.map.m)?;
        Ok(dist
            .iter()
            .enumerate()
            .filter(|(a, _)| window.contains(self.map.decode(*a)))
            .map(|(_, p)| p)
            .sum())
    }
}

/// One-shot projection; see [`GroundStateProjector`] for repeated use.
pub fn project_ground_state(
    evolver: &impl Evolution,
    trial: &StateVector,
    m: usize,
    window: EnergyWindow,
    sample: f64,
) -> Result<Projection> {
    GroundStateProjector::new(evolver, m)?.project(trial, window, sample)
}
