//! Algorithmic cooling with a single ancilla and a rejection random walk.
//!
//! One round prepares the ancilla with `H` and a phase gate, applies
//! `U = e^{−iHt}` controlled on it, closes with `H` and measures. Outcome `j`
//! applies `Λ_j = (I + (−1)^{j+1} i e^{iγ} U)/2` to the system, which scales
//! eigencomponent `k` by `(1 ∓ sin φ_k)/2` in probability with
//! `φ_k = E_k t − γ`. Outcome 0 favours low energies whenever every `φ_k`
//! lies in `[−π/2, π/2)`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rayon::prelude::*;

use crate::dense::{self, Matrix, C64, I};
use crate::error::{QsimError, Result};
use crate::gates::{standard_gate, StandardGate};
use crate::metrics::fidelity;
use crate::operators::{GateMatrix, HermitianOperator};
use crate::random::stream_rng;
use crate::state::StateVector;

/// How the spectrum is bracketed when choosing parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumBounds {
    /// Exact extreme eigenvalues.
    Dense,
    /// Gershgorin discs; an over-approximation that never needs diagonalization.
    Gershgorin,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoolingParams {
    pub gamma: f64,
    pub t: f64,
}

impl CoolingParams {
    pub fn phase(&self, energy: f64) -> f64 {
        energy * self.t - self.gamma
    }

    pub fn in_window(&self, energy: f64) -> bool {
        let phi = self.phase(energy);
        (-FRAC_PI_2..FRAC_PI_2).contains(&phi)
    }

    /// `(1 − sin φ)/2`, the outcome-0 weight of an eigenstate.
    pub fn p0_eigen(&self, energy: f64) -> f64 {
        0.5 * (1.0 - self.phase(energy).sin())
    }
}

/// Maps the bracketed spectrum onto `[−π/2 + margin, π/2 − margin]`.
pub fn choose_params(h: &HermitianOperator, margin: f64, bounds: SpectrumBounds) -> Result<CoolingParams> {
    if !(margin > 0.0 && margin < FRAC_PI_2) {
        return Err(QsimError::Precondition(format!("margin must lie in (0, π/2), got {margin}")));
    }
    let (lo, hi) = match bounds {
        SpectrumBounds::Dense => {
            let ev = h.eigenvalues();
            (ev[0], ev[ev.len() - 1])
        }
        SpectrumBounds::Gershgorin => h.gershgorin_bounds(),
    };
    let width = hi - lo;
    if width <= 1e-12 * lo.abs().max(hi.abs()).max(1.0) {
        return Ok(CoolingParams { gamma: lo, t: 1.0 });
    }
    let t = (PI - 2.0 * margin) / width;
    Ok(CoolingParams { gamma: t * (hi + lo) / 2.0, t })
}

/// A cooling round for a fixed Hamiltonian, with the controlled evolution cached.
#[derive(Clone, Debug)]
pub struct CoolingCircuit {
    hamiltonian: HermitianOperator,
    params: CoolingParams,
    energies: Vec<f64>,
    ground: StateVector,
    evolution: GateMatrix,
    prep: [GateMatrix; 2],
}

/// Result of one round.
#[derive(Clone, Debug, PartialEq)]
pub struct CoolingOutcome {
    pub outcome: u8,
    pub state: StateVector,
    pub probability: f64,
    pub p0: f64,
}

impl CoolingCircuit {
    /// Uses the exact evolution `e^{−iHt}`.
    pub fn new(h: &HermitianOperator, params: CoolingParams) -> Result<Self> {
        let u = h.evolution(params.t)?;
        Self::with_evolution(h, params, u)
    }

    /// Uses a caller-supplied approximation of `e^{−iHt}`, e.g. a Trotter
    /// circuit. The phase window is still checked against `h`.
    pub fn with_evolution(h: &HermitianOperator, params: CoolingParams, evolution: GateMatrix) -> Result<Self> {
        if !(params.t.is_finite() && params.gamma.is_finite()) {
            return Err(QsimError::NonFiniteParameter(format!("{params:?}")));
        }
        if evolution.arity() != h.n_qubits() {
            return Err(QsimError::ArityMismatch { arity: evolution.arity(), targets: h.n_qubits() });
        }
        let (energies, vecs) = h.eigh();
        if let Some(e) = energies.iter().find(|&&e| !params.in_window(e)) {
            return Err(QsimError::Precondition(format!(
                "phase {} of energy {e} lies outside [−π/2, π/2)",
                params.phase(*e)
            )));
        }
        let ground = StateVector::from_unnormalized(vecs.column(0).iter().copied().collect())?;
        let prep = [standard_gate(StandardGate::H)?, standard_gate(StandardGate::RzPhase(params.gamma))?];
        Ok(Self { hamiltonian: h.clone(), params, energies, ground, evolution, prep })
    }

    pub fn params(&self) -> CoolingParams {
        self.params
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn ground_state(&self) -> &StateVector {
        &self.ground
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.n_qubits() != self.hamiltonian.n_qubits() {
            return Err(QsimError::DimensionMismatch { expected: self.hamiltonian.n_qubits(), found: state.n_qubits() });
        }
        Ok(())
    }

    /// Runs the four-gate circuit with the ancilla above the system and
    /// measures it; outcome 0 is selected when `sample < p₀`.
    pub fn step(&self, state: &StateVector, sample: f64) -> Result<CoolingOutcome> {
        self.check_state(state)?;
        let n = state.n_qubits();
        let system: Vec<usize> = (0..n).collect();
        let mut joint = state.tensor(&StateVector::zero(1));
        joint.apply(&self.prep[0], &[n], &[])?;
        joint.apply(&self.prep[1], &[n], &[])?;
        joint.apply(&self.evolution, &system, &[n])?;
        joint.apply(&self.prep[0], &[n], &[])?;
        let m = joint.measure_qubit(n, sample)?;
        let (post, _) = joint.split_off_upper(&StateVector::basis(1, m.outcome as usize)?)?;
        Ok(CoolingOutcome { outcome: m.outcome, state: post, probability: m.probability, p0: m.p0 })
    }

    /// `Λ_j` as a dense matrix.
    pub fn lambda(&self, j: u8) -> Matrix {
        let sign = if j == 0 { -1.0 } else { 1.0 };
        let coeff = I * C64::from_polar(sign, self.params.gamma);
        let d = self.hamiltonian.dim();
        (dense::identity(d) + self.evolution.matrix() * coeff) * C64::new(0.5, 0.0)
    }

    /// Applies `Λ_j` directly; returns the normalized branch state and its probability.
    pub fn apply_lambda(&self, state: &StateVector, j: u8) -> Result<(StateVector, f64)> {
        self.check_state(state)?;
        let mut s = state.clone();
        s.apply_dense(&self.lambda(j))?;
        let p = s.norm_sqr();
        if p <= 0.0 {
            return Err(QsimError::ZeroProbabilityBranch);
        }
        s.normalize();
        Ok((s, p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBalance {
    pub e_in: f64,
    pub p0: f64,
    /// Outcome-0 branch energy; equals `e_in` when the branch is empty.
    pub e0: f64,
    pub p1: f64,
    pub e1: f64,
}

impl EnergyBalance {
    pub fn imbalance(&self) -> f64 {
        (self.p0 * self.e0 + self.p1 * self.e1 - self.e_in).abs()
    }
}

pub const BALANCE_TOL: f64 = 1e-10;

/// Branch energies of one round; fails if the probability-weighted energy
/// is not conserved.
pub fn energy_balance_check(circuit: &CoolingCircuit, state: &StateVector) -> Result<EnergyBalance> {
    let h = circuit.hamiltonian();
    let e_in = state.expectation(h)?;
    let branch = |j| -> Result<(f64, f64)> {
        match circuit.apply_lambda(state, j) {
            Ok((s, p)) => Ok((p, s.expectation(h)?)),
            Err(QsimError::ZeroProbabilityBranch) => Ok((0.0, e_in)),
            Err(e) => Err(e),
        }
    };
    let ((p0, e0), (p1, e1)) = (branch(0)?, branch(1)?);
    let b = EnergyBalance { e_in, p0, e0, p1, e1 };
    let scale = h.spectral_norm().max(1.0);
    if b.imbalance() > BALANCE_TOL * scale {
        return Err(QsimError::Numerical(format!("energy not conserved on average: {b:?}")));
    }
    Ok(b)
}

/// Walker position and history; `x` counts zeros minus ones.
#[derive(Clone, Debug, PartialEq)]
pub struct Walker {
    pub x: i64,
    pub state: StateVector,
    pub history: Vec<u8>,
}

impl Walker {
    pub fn new(state: StateVector) -> Self {
        Self { x: 0, state, history: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkStats {
    pub restarts: usize,
    /// Rounds over all attempts.
    pub steps: usize,
    pub final_energy: f64,
    /// False when the restart budget ran out before reaching `x_stop`.
    pub completed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkResult {
    /// The walker that reached `x_stop`, or the furthest one seen.
    pub walker: Walker,
    pub stats: WalkStats,
}

/// Repeats cooling rounds, moving right on outcome 0 and left on outcome 1.
/// Falling below zero restarts from `start`.
pub fn run_walk(
    circuit: &CoolingCircuit,
    start: &StateVector,
    x_stop: i64,
    max_restarts: usize,
    rng: &mut impl Rng,
) -> Result<WalkResult> {
    if x_stop < 1 {
        return Err(QsimError::InvalidArgument(format!("x_stop must be >= 1, got {x_stop}")));
    }
    circuit.check_state(start)?;
    let mut walker = Walker::new(start.clone());
    let mut best = walker.clone();
    let mut restarts = 0;
    let mut steps = 0;
    loop {
        let out = circuit.step(&walker.state, rng.random::<f64>())?;
        steps += 1;
        walker.x += if out.outcome == 0 { 1 } else { -1 };
        walker.history.push(out.outcome);
        walker.state = out.state;
        if walker.x > best.x {
            best = walker.clone();
        }
        if walker.x == x_stop {
            let final_energy = walker.state.expectation(circuit.hamiltonian())?;
            return Ok(WalkResult { walker, stats: WalkStats { restarts, steps, final_energy, completed: true } });
        }
        if walker.x < 0 {
            if restarts == max_restarts {
                let final_energy = best.state.expectation(circuit.hamiltonian())?;
                return Ok(WalkResult {
                    walker: best,
                    stats: WalkStats { restarts, steps, final_energy, completed: false },
                });
            }
            restarts += 1;
            walker = Walker::new(start.clone());
        }
    }
}

/// One CSV row of an ensemble run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleRow {
    pub walker: usize,
    pub restarts: usize,
    pub steps: usize,
    pub final_energy: f64,
    pub ground_fidelity: f64,
    pub completed: bool,
}

/// Independent walkers in parallel; walker `w` draws from stream `w` of `seed`.
pub fn run_ensemble(
    circuit: &CoolingCircuit,
    start: &StateVector,
    x_stop: i64,
    max_restarts: usize,
    walkers: usize,
    seed: u64,
) -> Result<Vec<EnsembleRow>> {
    (0..walkers)
        .into_par_iter()
        .map(|w| {
            let mut rng = stream_rng(seed, w as u64);
            let r = run_walk(circuit, start, x_stop, max_restarts, &mut rng)?;
            Ok(EnsembleRow {
                walker: w,
                restarts: r.stats.restarts,
                steps: r.stats.steps,
                final_energy: r.stats.final_energy,
                ground_fidelity: fidelity(&r.walker.state, circuit.ground_state())?,
                completed: r.stats.completed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_state;
    use approx::assert_abs_diff_eq;

    fn z_circuit(margin: f64) -> CoolingCircuit {
        let z = HermitianOperator::pauli_z();
        CoolingCircuit::new(&z, choose_params(&z, margin, SpectrumBounds::Dense).unwrap()).unwrap()
    }

    #[test]
    fn params_fill_the_window() {
        let p = choose_params(&HermitianOperator::pauli_z(), 0.1, SpectrumBounds::Dense).unwrap();
        assert_abs_diff_eq!(p.phase(1.0), FRAC_PI_2 - 0.1, epsilon = 1e-14);
        assert_abs_diff_eq!(p.phase(-1.0), -FRAC_PI_2 + 0.1, epsilon = 1e-14);
        assert!(choose_params(&HermitianOperator::pauli_z(), -0.1, SpectrumBounds::Dense).is_err());
        let flat = choose_params(&HermitianOperator::identity(1).scaled(3.0), 0.1, SpectrumBounds::Dense).unwrap();
        assert_eq!(flat, CoolingParams { gamma: 3.0, t: 1.0 });
    }

    #[test]
    fn window_violation_refused() {
        let z = HermitianOperator::pauli_z();
        assert!(matches!(
            CoolingCircuit::new(&z, CoolingParams { gamma: 0.0, t: 2.0 }),
            Err(QsimError::Precondition(_))
        ));
    }

    #[test]
    fn eigenstate_probabilities_and_fixed_points() {
        let c = z_circuit(0.2);
        for (x, e) in [(0usize, 1.0), (1, -1.0)] {
            let s = StateVector::basis(1, x).unwrap();
            let out = c.step(&s, 0.0).unwrap();
            assert_abs_diff_eq!(out.p0, c.params().p0_eigen(e), epsilon = 1e-14);
            assert!(fidelity(&out.state, &s).unwrap() > 1.0 - 1e-14);
        }
        let mid = CoolingCircuit::new(&HermitianOperator::pauli_z(), CoolingParams { gamma: 0.5, t: 0.5 }).unwrap();
        let out = mid.step(&StateVector::basis(1, 0).unwrap(), 0.0).unwrap();
        assert_abs_diff_eq!(out.p0, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn circuit_matches_lambda() {
        let mut rng = stream_rng(1, 0);
        let h = crate::random::random_hermitian(2, 1.0, &mut rng);
        let c = CoolingCircuit::new(&h, choose_params(&h, 0.05, SpectrumBounds::Gershgorin).unwrap()).unwrap();
        let s = random_state(2, &mut rng);
        for (sample, j) in [(0.0, 0u8), (0.999_999, 1)] {
            let out = c.step(&s, sample).unwrap();
            let (direct, p) = c.apply_lambda(&s, j).unwrap();
            assert_eq!(out.outcome, j);
            assert_abs_diff_eq!(out.probability, p, epsilon = 1e-12);
            assert!(fidelity(&out.state, &direct).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn superposition_splits_energy() {
        let c = z_circuit(0.1);
        let s = StateVector::uniform(1);
        let b = energy_balance_check(&c, &s).unwrap();
        assert!(b.e0 < b.e_in && b.e_in < b.e1, "{b:?}");
        assert!(b.imbalance() < 1e-12);
    }

    #[test]
    fn walk_from_ground_state_never_moves_it() {
        let c = z_circuit(0.1);
        let g = StateVector::basis(1, 1).unwrap();
        let r = run_walk(&c, &g, 3, 100, &mut stream_rng(2, 0)).unwrap();
        assert!(r.stats.completed);
        assert!(fidelity(&r.walker.state, &g).unwrap() > 1.0 - 1e-14);
        assert_eq!(r.walker.x, 3);
        let zeros = r.walker.history.iter().filter(|&&b| b == 0).count() as i64;
        assert_eq!(zeros - (r.walker.history.len() as i64 - zeros), r.walker.x);
    }

    #[test]
    fn exhausted_restarts_reported() {
        // the excited state almost always steps left
        let c = z_circuit(0.01);
        let hot = StateVector::basis(1, 0).unwrap();
        let r = run_walk(&c, &hot, 5, 3, &mut stream_rng(3, 0)).unwrap();
        assert!(!r.stats.completed);
        assert_eq!(r.stats.restarts, 3);
        assert!(run_walk(&c, &hot, 0, 3, &mut stream_rng(3, 0)).is_err());
    }
}
