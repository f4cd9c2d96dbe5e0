//! Grid-based dynamics of a few particles in one dimension.
//!
//! Each particle owns `m` qubits holding its grid index; particle `i` sits on
//! qubits `i·m .. (i+1)·m`. Evolution alternates a diagonal potential phase
//! with a kinetic phase applied in the Fourier basis.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::dense::C64;
use crate::error::{QsimError, Result};
use crate::gates::{standard_gate, StandardGate};
use crate::spectral::{inverse_qft, qft, qft_circuit};
use crate::state::{gather_bits, StateVector};

/// Periodic grid of `2^m` points on `[x_min, x_max)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    m_qubits: usize,
    x_min: f64,
    x_max: f64,
}

impl Grid1D {
    pub fn new(m_qubits: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if m_qubits == 0 || m_qubits > 20 {
            return Err(QsimError::InvalidArgument(format!("grid qubits must be in 1..=20, got {m_qubits}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(QsimError::InvalidArgument(format!("grid needs x_max > x_min, got [{x_min}, {x_max})")));
        }
        Ok(Self { m_qubits, x_min, x_max })
    }

    pub fn m_qubits(&self) -> usize {
        self.m_qubits
    }

    pub fn points(&self) -> usize {
        1 << self.m_qubits
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / self.points() as f64
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn position(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.spacing()
    }

    /// Signed momentum of Fourier index `k`: indices in the upper half map to
    /// negative momenta.
    pub fn momentum(&self, k: usize) -> f64 {
        let n = self.points();
        let signed = if k >= n / 2 { k as f64 - n as f64 } else { k as f64 };
        2.0 * PI * signed / (n as f64 * self.spacing())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Particle {
    pub mass: f64,
    pub charge: f64,
    pub grid: Grid1D,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParticleSystem {
    particles: Vec<Particle>,
}

impl ParticleSystem {
    pub fn new(particles: Vec<Particle>) -> Result<Self> {
        if particles.is_empty() {
            return Err(QsimError::InvalidArgument("particle system is empty".into()));
        }
        if let Some(p) = particles.iter().find(|p| !(p.mass > 0.0)) {
            return Err(QsimError::InvalidArgument(format!("particle mass must be positive, got {}", p.mass)));
        }
        let total: usize = particles.iter().map(|p| p.grid.m_qubits).sum();
        if total > 24 {
            return Err(QsimError::DimensionTooLarge { n_qubits: total, limit: 24 });
        }
        Ok(Self { particles })
    }

    pub fn single(mass: f64, grid: Grid1D) -> Result<Self> {
        Self::new(vec![Particle { mass, charge: 0.0, grid }])
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// Total register size `Σ m_i`.
    pub fn n_qubits(&self) -> usize {
        self.particles.iter().map(|p| p.grid.m_qubits).sum()
    }

    /// Qubits holding particle `i`'s coordinate, least significant first.
    pub fn register(&self, i: usize) -> Vec<usize> {
        let start: usize = self.particles[..i].iter().map(|p| p.grid.m_qubits).sum();
        (start..start + self.particles[i].grid.m_qubits).collect()
    }

    /// Grid coordinates encoded by basis index `x`.
    pub fn coordinates(&self, x: usize, out: &mut Vec<f64>) {
        out.clear();
        let mut shift = 0;
        for p in &self.particles {
            let k = (x >> shift) & (p.grid.points() - 1);
            out.push(p.grid.position(k));
            shift += p.grid.m_qubits;
        }
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.n_qubits() != self.n_qubits() {
            return Err(QsimError::DimensionMismatch { expected: self.n_qubits(), found: state.n_qubits() });
        }
        Ok(())
    }
}

type PotentialFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Potential energy `V(x_1, …, x_B)` with the bit width used by the
/// circuit-level phase oracles.
#[derive(Clone)]
pub struct PotentialSpec {
    callback: PotentialFn,
    m_v: usize,
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec").field("m_v", &self.m_v).finish_non_exhaustive()
    }
}

pub const DEFAULT_POTENTIAL_BITS: usize = 16;

impl PotentialSpec {
    pub fn new(m_v: usize, callback: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if m_v == 0 || m_v > 24 {
            return Err(QsimError::InvalidArgument(format!("potential bits must be in 1..=24, got {m_v}")));
        }
        Ok(Self { callback: Arc::new(callback), m_v })
    }

    pub fn zero() -> Self {
        Self::new(DEFAULT_POTENTIAL_BITS, |_| 0.0).expect("valid width")
    }

    /// `½ M ω² x²` summed over particles (masses taken from `system`).
    pub fn harmonic(system: &ParticleSystem, omega: f64, m_v: usize) -> Result<Self> {
        let masses: Vec<f64> = system.particles.iter().map(|p| p.mass).collect();
        Self::new(m_v, move |x| x.iter().zip(&masses).map(|(x, m)| 0.5 * m * omega * omega * x * x).sum())
    }

    pub fn m_v(&self) -> usize {
        self.m_v
    }

    pub fn with_bits(&self, m_v: usize) -> Result<Self> {
        if m_v == 0 || m_v > 24 {
            return Err(QsimError::InvalidArgument(format!("potential bits must be in 1..=24, got {m_v}")));
        }
        Ok(Self { callback: self.callback.clone(), m_v })
    }

    pub fn eval(&self, coords: &[f64]) -> f64 {
        (self.callback)(coords)
    }

    /// `V` at every basis index of the system register.
    pub fn table(&self, system: &ParticleSystem) -> Result<Vec<f64>> {
        let mut coords = Vec::with_capacity(system.len());
        let mut out = Vec::with_capacity(1 << system.n_qubits());
        for x in 0..1usize << system.n_qubits() {
            system.coordinates(x, &mut coords);
            let v = self.eval(&coords);
            if !v.is_finite() {
                return Err(QsimError::NonFiniteParameter(format!("potential at {coords:?}")));
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Linear rescale of `V` onto the integers `0 ..= 2^{m_V} − 1`.
    pub fn levels(&self, system: &ParticleSystem) -> Result<Vec<u64>> {
        let table = self.table(system)?;
        let (lo, hi) = min_max(&table);
        let top = ((1u64 << self.m_v) - 1) as f64;
        let span = hi - lo;
        Ok(table
            .iter()
            .map(|v| if span > 0.0 { ((v - lo) / span * top).round().clamp(0.0, top) as u64 } else { 0 })
            .collect())
    }

    /// Per-step phase `(V − V_min)·dt` written as an `m_V`-bit binary
    /// fraction of a full turn: the integer added by the phase oracles.
    pub fn phase_register_values(&self, system: &ParticleSystem, dt: f64) -> Result<Vec<u64>> {
        let table = self.table(system)?;
        let (lo, _) = min_max(&table);
        let m = (1u64 << self.m_v) as f64;
        Ok(table
            .iter()
            .map(|v| {
                let turns = ((v - lo) * dt / (2.0 * PI)).rem_euclid(1.0);
                ((turns * m).round() as u64) & ((1u64 << self.m_v) - 1)
            })
            .collect())
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Softened pairwise Coulomb interaction `Σ_{i<j} q_i q_j / √((x_i − x_j)² + a²)`.
pub fn coulomb_potential(system: &ParticleSystem, softening: f64, m_v: usize) -> Result<PotentialSpec> {
    if !(softening > 0.0) {
        return Err(QsimError::InvalidArgument(format!("softening must be positive, got {softening}")));
    }
    let charges: Vec<f64> = system.particles.iter().map(|p| p.charge).collect();
    PotentialSpec::new(m_v, move |x| {
        let mut v = 0.0;
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                let d = x[i] - x[j];
                v += charges[i] * charges[j] / (d * d + softening * softening).sqrt();
            }
        }
        v
    })
}

/// How the potential phase is realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialMode {
    /// Multiply each amplitude by `e^{−iV(x)dt}`.
    Direct,
    /// Reversible modular adder acting on an ancilla register in `QFT|1⟩`.
    Kickback,
    /// Compute the phase integer into a zeroed ancilla register, apply one
    /// `R_k` per bit, then uncompute.
    RkLadder,
}

impl PotentialMode {
    pub fn uses_ancilla(self) -> bool {
        !matches!(self, PotentialMode::Direct)
    }
}

/// Ancilla register state expected by `mode`.
pub fn prepared_ancilla(mode: PotentialMode, m_v: usize) -> Result<StateVector> {
    match mode {
        PotentialMode::Direct => Err(QsimError::InvalidArgument("direct mode has no ancilla".into())),
        PotentialMode::RkLadder => Ok(StateVector::zero(m_v)),
        PotentialMode::Kickback => {
            let mut q = StateVector::basis(m_v, 1)?;
            let all: Vec<usize> = (0..m_v).collect();
            qft_circuit(m_v)?.apply(&mut q, &all)?;
            Ok(q)
        }
    }
}

/// One potential step.
///
/// In `Direct` mode `state` is the bare system register. In the circuit modes
/// it must carry the `m_V` ancilla qubits above the system register, already
/// prepared by [`prepared_ancilla`].
pub fn potential_phase_step(
    state: &mut StateVector,
    system: &ParticleSystem,
    potential: &PotentialSpec,
    dt: f64,
    mode: PotentialMode,
) -> Result<()> {
    let n_sys = system.n_qubits();
    if !dt.is_finite() {
        return Err(QsimError::NonFiniteParameter(format!("dt = {dt}")));
    }
    match mode {
        PotentialMode::Direct => {
            system.check_state(state)?;
            let table = potential.table(system)?;
            state.apply_diagonal(|x| C64::from_polar(1.0, -table[x] * dt));
        }
        PotentialMode::Kickback | PotentialMode::RkLadder => {
            let m_v = potential.m_v;
            if state.n_qubits() != n_sys + m_v {
                return Err(QsimError::Precondition(format!(
                    "{mode:?} needs {m_v} ancilla qubits above the {n_sys}-qubit system register, state has {} qubits",
                    state.n_qubits()
                )));
            }
            let values = potential.phase_register_values(system, dt)?;
            let sys_mask = (1usize << n_sys) - 1;
            let anc_mask = (1usize << m_v) - 1;
            if mode == PotentialMode::Kickback {
                // |x⟩|y⟩ → |x⟩|y + K(x) mod 2^m⟩; the QFT|1⟩ ancilla picks up e^{−2πiK/2^m}
                state.apply_permutation(|i| {
                    let x = i & sys_mask;
                    let y = (i >> n_sys) & anc_mask;
                    x | (((y + values[x] as usize) & anc_mask) << n_sys)
                });
            } else {
                let xor = |i: usize| {
                    let x = i & sys_mask;
                    i ^ ((values[x] as usize) << n_sys)
                };
                state.apply_permutation(xor);
                for j in 0..m_v {
                    let rk = standard_gate(StandardGate::Rk((m_v - j) as u32))?;
                    state.apply(&rk, &[n_sys + j], &[])?;
                }
                state.apply_permutation(xor);
            }
        }
    }
    Ok(())
}

/// Runs a circuit-mode potential step on a bare system state: attaches the
/// prepared ancilla, applies the step, and detaches it again.
///
/// Returns the evolved system state and the fidelity of the returned ancilla
/// with its prepared state.
pub fn potential_step_with_ancilla(
    state: &StateVector,
    system: &ParticleSystem,
    potential: &PotentialSpec,
    dt: f64,
    mode: PotentialMode,
) -> Result<(StateVector, f64)> {
    if !mode.uses_ancilla() {
        let mut s = state.clone();
        potential_phase_step(&mut s, system, potential, dt, mode)?;
        return Ok((s, 1.0));
    }
    system.check_state(state)?;
    let ancilla = prepared_ancilla(mode, potential.m_v)?;
    let mut full = state.tensor(&ancilla);
    potential_phase_step(&mut full, system, potential, dt, mode)?;
    full.split_off_upper(&ancilla)
}

/// Kinetic step: Fourier transform each particle register, apply
/// `e^{−i p²/(2M) dt}`, transform back.
pub fn kinetic_phase_step(state: &mut StateVector, system: &ParticleSystem, dt: f64) -> Result<()> {
    system.check_state(state)?;
    let regs: Vec<Vec<usize>> = (0..system.len()).map(|i| system.register(i)).collect();
    for r in &regs {
        qft(state, r)?;
    }
    let phases = kinetic_table(system);
    state.apply_diagonal(|k| C64::from_polar(1.0, -phases[k] * dt));
    for r in &regs {
        inverse_qft(state, r)?;
    }
    Ok(())
}

/// Kinetic energy at every Fourier index of the system register.
fn kinetic_table(system: &ParticleSystem) -> Vec<f64> {
    let per: Vec<Vec<f64>> = system
        .particles
        .iter()
        .map(|p| (0..p.grid.points()).map(|k| p.grid.momentum(k).powi(2) / (2.0 * p.mass)).collect())
        .collect();
    let regs: Vec<Vec<usize>> = (0..system.len()).map(|i| system.register(i)).collect();
    (0..1usize << system.n_qubits())
        .map(|k| regs.iter().zip(&per).map(|(r, t)| t[gather_bits(k, r)]).sum())
        .collect()
}

/// `slices` split-operator steps of total duration `t`.
///
/// Order 1 applies `V` then `T` per slice; order 2 uses `V/2, T, V/2`.
pub fn evolve_split_operator(
    state: &mut StateVector,
    system: &ParticleSystem,
    potential: &PotentialSpec,
    t: f64,
    slices: usize,
    order: u32,
) -> Result<()> {
    let mut stepper = SplitOperator::new(system, potential, t / slices.max(1) as f64, order)?;
    if slices == 0 {
        return Err(QsimError::InvalidArgument("slice count must be at least 1".into()));
    }
    for _ in 0..slices {
        stepper.step(state)?;
    }
    Ok(())
}

/// Precomputed diagonal factors for repeated split-operator steps.
pub struct SplitOperator<'a> {
    system: &'a ParticleSystem,
    v_phase: Vec<C64>,
    t_phase: Vec<C64>,
    order: u32,
    regs: Vec<Vec<usize>>,
}

impl<'a> SplitOperator<'a> {
    pub fn new(system: &'a ParticleSystem, potential: &PotentialSpec, dt: f64, order: u32) -> Result<Self> {
        Self::with_mode(system, potential, dt, order, PotentialMode::Direct)
    }

    /// As [`SplitOperator::new`], with the potential factor realized by `mode`.
    ///
    /// A circuit-mode step is diagonal on the system once its ancilla returns
    /// to the prepared state, so it is run once on the uniform superposition
    /// and the resulting phases are reused for every slice.
    pub fn with_mode(system: &'a ParticleSystem, potential: &PotentialSpec, dt: f64, order: u32, mode: PotentialMode) -> Result<Self> {
        if order != 1 && order != 2 {
            return Err(QsimError::InvalidArgument(format!("split-operator order must be 1 or 2, got {order}")));
        }
        if !dt.is_finite() {
            return Err(QsimError::NonFiniteParameter(format!("dt = {dt}")));
        }
        let v_dt = if order == 2 { dt / 2.0 } else { dt };
        let v_phase = potential_diagonal(system, potential, v_dt, mode)?;
        let t_phase = kinetic_table(system).iter().map(|e| C64::from_polar(1.0, -e * dt)).collect();
        let regs = (0..system.len()).map(|i| system.register(i)).collect();
        Ok(Self { system, v_phase, t_phase, order, regs })
    }

    pub fn step(&mut self, state: &mut StateVector) -> Result<()> {
        self.system.check_state(state)?;
        state.apply_diagonal(|x| self.v_phase[x]);
        for r in &self.regs {
            qft(state, r)?;
        }
        state.apply_diagonal(|k| self.t_phase[k]);
        for r in &self.regs {
            inverse_qft(state, r)?;
        }
        if self.order == 2 {
            state.apply_diagonal(|x| self.v_phase[x]);
        }
        Ok(())
    }
}

/// Diagonal of one potential step of duration `dt` as realized by `mode`.
pub fn potential_diagonal(system: &ParticleSystem, potential: &PotentialSpec, dt: f64, mode: PotentialMode) -> Result<Vec<C64>> {
    if !mode.uses_ancilla() {
        return Ok(potential.table(system)?.iter().map(|v| C64::from_polar(1.0, -v * dt)).collect());
    }
    let probe = StateVector::uniform(system.n_qubits());
    let (out, ancilla_fidelity) = potential_step_with_ancilla(&probe, system, potential, dt, mode)?;
    if (1.0 - ancilla_fidelity).abs() > 1e-10 {
        return Err(QsimError::Numerical(format!("{mode:?} ancilla not returned (fidelity {ancilla_fidelity})")));
    }
    let scale = (probe.dim() as f64).sqrt();
    Ok(out.amplitudes().iter().map(|a| {
        let z = a * scale;
        z / z.norm()
    }).collect())
}

/// Gaussian wave packet `exp(−(x − x0)²/(4σ²) + i p0 x)` on the grid.
pub fn gaussian_packet(grid: &Grid1D, x0: f64, sigma: f64, p0: f64) -> Result<StateVector> {
    if !(sigma > 0.0) {
        return Err(QsimError::InvalidArgument(format!("packet width must be positive, got {sigma}")));
    }
    let amps = (0..grid.points())
        .map(|k| {
            let x = grid.position(k);
            C64::from_polar((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), p0 * x)
        })
        .collect();
    StateVector::from_unnormalized(amps)
}

/// Coherent state of a harmonic oscillator displaced to `x0`.
pub fn coherent_state(grid: &Grid1D, mass: f64, omega: f64, x0: f64) -> Result<StateVector> {
    gaussian_packet(grid, x0, (1.0 / (2.0 * mass * omega)).sqrt(), 0.0)
}

/// Observables for one particle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticleMoments {
    pub mean_x: f64,
    pub mean_p: f64,
}

/// `⟨x_i⟩` and `⟨p_i⟩` for each particle.
pub fn moments(state: &StateVector, system: &ParticleSystem) -> Result<Vec<ParticleMoments>> {
    system.check_state(state)?;
    let norm = state.norm_sqr();
    let mut momentum_state = state.clone();
    let regs: Vec<Vec<usize>> = (0..system.len()).map(|i| system.register(i)).collect();
    // inverse transform: amplitude at index k is the e^{+ipx} component
    for r in &regs {
        inverse_qft(&mut momentum_state, r)?;
    }
    Ok(system
        .particles
        .iter()
        .zip(&regs)
        .map(|(p, r)| {
            let px = state.register_distribution(r).expect("valid register");
            let pk = momentum_state.register_distribution(r).expect("valid register");
            ParticleMoments {
                mean_x: px.iter().enumerate().map(|(k, w)| w * p.grid.position(k)).sum::<f64>() / norm,
                mean_p: pk.iter().enumerate().map(|(k, w)| w * p.grid.momentum(k)).sum::<f64>() / norm,
            }
        })
        .collect())
}

/// `⟨T + V⟩` of the discretized grid Hamiltonian.
pub fn grid_energy(state: &StateVector, system: &ParticleSystem, potential: &PotentialSpec) -> Result<f64> {
    system.check_state(state)?;
    let norm = state.norm_sqr();
    let v = potential.table(system)?;
    let pot: f64 = state.probabilities().iter().zip(&v).map(|(p, v)| p * v).sum();
    let mut ks = state.clone();
    for i in 0..system.len() {
        qft(&mut ks, &system.register(i))?;
    }
    let kin: f64 = ks.probabilities().iter().zip(kinetic_table(system)).map(|(p, t)| p * t).sum();
    Ok((pot + kin) / norm)
}

/// One row of a split-operator trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub step: usize,
    pub time: f64,
    pub moments: Vec<ParticleMoments>,
    pub norm: f64,
    pub energy: f64,
}

/// Evolves for `slices` steps recording a row every `stride` steps (and at
/// the end).
pub fn trajectory(
    state: &mut StateVector,
    system: &ParticleSystem,
    potential: &PotentialSpec,
    t: f64,
    slices: usize,
    order: u32,
    stride: usize,
) -> Result<Vec<TrajectoryRow>> {
    if slices == 0 || stride == 0 {
        return Err(QsimError::InvalidArgument("slices and stride must be at least 1".into()));
    }
    let dt = t / slices as f64;
    let mut stepper = SplitOperator::new(system, potential, dt, order)?;
    let row = |state: &StateVector, step: usize| -> Result<TrajectoryRow> {
        Ok(TrajectoryRow {
            step,
            time: step as f64 * dt,
            moments: moments(state, system)?,
            norm: state.norm_sqr().sqrt(),
            energy: grid_energy(state, system, potential)?,
        })
    };
    let mut rows = vec![row(state, 0)?];
    for step in 1..=slices {
        stepper.step(state)?;
        if step % stride == 0 || step == slices {
            rows.push(row(state, step)?);
        }
    }
    Ok(rows)
}
