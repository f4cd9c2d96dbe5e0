//! Phase-estimation energies from a Trotterized Pauli Hamiltonian.

use rand::Rng;

use crate::dense::{self, Matrix};
use crate::error::{QsimError, Result};
use crate::spectral::{ancilla_budget, phase_estimation, EnergyWindow, Evolution, SpectralMap};
use crate::state::StateVector;
use crate::trotter::TrotterPlan;

use super::pauli::QubitHamiltonian;

/// Product-formula approximation of `e^{−iHt}` for a Pauli-sum Hamiltonian.
#[derive(Clone, Copy, Debug)]
pub struct TrotterizedPauli<'a> {
    pub hamiltonian: &'a QubitHamiltonian,
    pub order: u32,
    pub slices: usize,
}

impl TrotterizedPauli<'_> {
    /// Applies the product formula for time `t` to `state`.
    pub fn evolve(&self, state: &mut StateVector, t: f64) -> Result<()> {
        let h = self.hamiltonian;
        if h.is_empty() {
            return Ok(());
        }
        let plan = TrotterPlan::new(h.len(), t, self.order, self.slices)?;
        for step in plan.steps() {
            let s = &h.strings()[step.term];
            s.apply_exp(state.amplitudes_mut(), s.coeff().re * step.duration);
        }
        Ok(())
    }
}

impl Evolution for TrotterizedPauli<'_> {
    fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    fn unitary(&self, t: f64) -> Result<Matrix> {
        let h = self.hamiltonian;
        let dim = 1usize << h.n_qubits();
        dense::guard_dimension(dim)?;
        let mut u = dense::identity(dim);
        if h.is_empty() {
            return Ok(u);
        }
        let plan = TrotterPlan::new(h.len(), t, self.order, self.slices)?;
        for mut col in u.column_iter_mut() {
            let amps = col.as_mut_slice();
            for step in plan.steps() {
                let s = &h.strings()[step.term];
                s.apply_exp(amps, s.coeff().re * step.duration);
            }
        }
        Ok(u)
    }

    fn spectral_bounds(&self) -> (f64, f64) {
        self.hamiltonian.coefficient_bounds()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundEnergyOptions {
    /// Bits of phase wanted with probability at least `1 − epsilon`.
    pub p_bits: usize,
    pub epsilon: f64,
    pub order: u32,
    pub slices: usize,
    /// Give up after this many phase-estimation runs.
    pub max_trials: usize,
    /// Outcomes counted as the ground band. Defaults to energies at or below
    /// `⟨trial|H|trial⟩` plus one `p`-bit band.
    pub window: Option<EnergyWindow>,
    /// Repeat with doubled slices and fail if the decoded energy moves by
    /// more than one `p`-bit band.
    pub check_slicing: bool,
}

impl Default for GroundEnergyOptions {
    fn default() -> Self {
        Self { p_bits: 10, epsilon: 1.0 / 16.0, order: 2, slices: 8, max_trials: 1000, window: None, check_slicing: true }
    }
}

#[derive(Clone, Debug)]
pub struct GroundEnergyEstimate {
    pub energy: f64,
    pub accepted: bool,
    pub trials: usize,
    pub ancillas: usize,
    /// Width of one `p`-bit band in energy units.
    pub band: f64,
    pub lo: f64,
    pub hi: f64,
    /// Post-measurement register of the accepted run.
    pub state: StateVector,
}

/// Phase estimation over the Trotterized `e^{−iHτ}`, repeated until an
/// outcome lands in the ground band.
pub fn estimate_ground_energy(
    hamiltonian: &QubitHamiltonian,
    trial: &StateVector,
    opts: &GroundEnergyOptions,
    rng: &mut impl Rng,
) -> Result<GroundEnergyEstimate> {
    if (trial.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(QsimError::NotNormalized(trial.norm_sqr().sqrt()));
    }
    if trial.n_qubits() != hamiltonian.n_qubits() {
        return Err(QsimError::DimensionMismatch { expected: hamiltonian.n_qubits(), found: trial.n_qubits() });
    }
    if opts.p_bits == 0 || opts.max_trials == 0 {
        return Err(QsimError::InvalidArgument("p_bits and max_trials must be positive".into()));
    }
    let m = ancilla_budget(opts.p_bits, opts.epsilon)?;
    let (lo, hi) = hamiltonian.coefficient_bounds();
    let map = SpectralMap::new(lo, hi, m);
    let band = (map.hi - map.lo) / (1u64 << opts.p_bits) as f64;
    let window = match opts.window {
        Some(w) => w,
        None => EnergyWindow::new(map.lo - band, hamiltonian.expectation(trial)? + band)?,
    };
    let oracle = |slices| map.oracle(&TrotterizedPauli { hamiltonian, order: opts.order, slices });
    let coarse = oracle(opts.slices)?;
    let fine = if opts.check_slicing { Some(oracle(2 * opts.slices)?) } else { None };

    let mut last = None;
    for trial_no in 1..=opts.max_trials {
        let u: f64 = rng.random();
        let out = phase_estimation(&coarse, trial, m, u)?;
        let energy = map.decode(out.estimate.register_outcome);
        let accepted = window.contains(energy);
        if accepted {
            if let Some(fine) = &fine {
                let refined = map.decode(phase_estimation(fine, trial, m, u)?.estimate.register_outcome);
                if (refined - energy).abs() > band {
                    return Err(QsimError::Numerical(format!(
                        "Trotter slicing too coarse: energy moved from {energy} to {refined} when doubling {} slices",
                        opts.slices
                    )));
                }
            }
        }
        let est = GroundEnergyEstimate {
            energy,
            accepted,
            trials: trial_no,
            ancillas: m,
            band,
            lo: map.lo,
            hi: map.hi,
            state: out.register,
        };
        if accepted {
            return Ok(est);
        }
        last = Some(est);
    }
    Ok(last.expect("at least one trial"))
}
