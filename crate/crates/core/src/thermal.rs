//! Gibbs states and their perturbative construction.
//!
//! A coupling `h` is switched on in steps of size `ε`; each step applies
//! `ρ ↦ KρK / Tr(KρK)` with `K = 1 − εβh/2` and then dephases in the
//! eigenbasis of the updated Hamiltonian.

use rand::Rng;
use rayon::prelude::*;

use crate::dense::{self, Matrix, C64};
use crate::error::{QsimError, Result};
use crate::metrics::trace_distance;
use crate::operators::{DensityMatrix, HermitianOperator};
use crate::random::{random_hermitian, stream_rng};

/// Dense thermal-state register limit.
pub const THERMAL_QUBIT_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct ThermalContext {
    pub hamiltonian: HermitianOperator,
    pub beta: f64,
    pub rho: DensityMatrix,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(QsimError::InvalidArgument(format!("inverse temperature must be finite and >= 0, got {beta}")));
    }
    Ok(())
}

/// `e^{−βH}/Tr e^{−βH}` by diagonalization.
pub fn exact_thermal(h: &HermitianOperator, beta: f64) -> Result<ThermalContext> {
    check_beta(beta)?;
    if h.n_qubits() > THERMAL_QUBIT_LIMIT {
        return Err(QsimError::DimensionTooLarge { n_qubits: h.n_qubits(), limit: THERMAL_QUBIT_LIMIT });
    }
    let (vals, vecs) = h.eigh();
    let e0 = vals[0];
    let z: f64 = vals.iter().map(|e| (-beta * (e - e0)).exp()).sum();
    let rho = dense::from_spectrum(&vals, &vecs, |e| C64::new((-beta * (e - e0)).exp() / z, 0.0));
    Ok(ThermalContext { hamiltonian: h.clone(), beta, rho: DensityMatrix::new(rho)? })
}

/// How coherences between distinct energies are removed after an update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dephasing {
    /// Zero every coherence between distinct eigenvalues.
    Exact,
    /// Average of free evolution over an exponentially distributed time
    /// with the given mean: coherences scale by `1/(1 + iωτ)`.
    RandomTime { mean_time: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpdateOutcome {
    pub context: ThermalContext,
    /// Probability reported for the step; equal to `exact_success`.
    pub success_probability: f64,
    pub exact_success: f64,
    pub first_order_success: f64,
}

/// Eigenvalues closer than this are treated as one level when dephasing.
const LEVEL_TOL: f64 = 1e-12;

fn dephase(rho: &Matrix, h: &HermitianOperator, mode: Dephasing) -> Matrix {
    let (vals, vecs) = h.eigh();
    let mut r = vecs.adjoint() * rho * &vecs;
    let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
    for i in 0..vals.len() {
        for j in 0..vals.len() {
            let w = vals[i] - vals[j];
            if w.abs() <= LEVEL_TOL * scale {
                continue;
            }
            match mode {
                Dephasing::Exact => r[(i, j)] = C64::new(0.0, 0.0),
                Dephasing::RandomTime { mean_time } => r[(i, j)] /= C64::new(1.0, w * mean_time),
            }
        }
    }
    &vecs * r * vecs.adjoint()
}

/// One perturbative step adding `εh` to the context Hamiltonian.
pub fn perturbative_update(ctx: &ThermalContext, h: &HermitianOperator, epsilon: f64, mode: Dephasing) -> Result<UpdateOutcome> {
    if h.dim() != ctx.hamiltonian.dim() {
        return Err(QsimError::DimensionMismatch { expected: ctx.hamiltonian.dim(), found: h.dim() });
    }
    if let Dephasing::RandomTime { mean_time } = mode {
        if !(mean_time >= 0.0) {
            return Err(QsimError::InvalidArgument(format!("mean dephasing time must be >= 0, got {mean_time}")));
        }
    }
    let strength = epsilon.abs() * ctx.beta * h.spectral_norm();
    if !(strength < 1.0) {
        return Err(QsimError::Precondition(format!("need εβ‖h‖ < 1 for a positive update factor, got {strength}")));
    }
    let k = dense::identity(h.dim()) - h.matrix() * C64::new(epsilon * ctx.beta / 2.0, 0.0);
    let sigma = &k * ctx.rho.matrix() * &k;
    let exact_success = sigma.trace().re;
    let first_order_success = 1.0 - epsilon * ctx.beta * ctx.rho.expectation(h)?;
    let next_h = ctx.hamiltonian.plus(&h.scaled(epsilon))?;
    let rho = dephase(&(sigma / C64::new(exact_success, 0.0)), &next_h, mode);
    Ok(UpdateOutcome {
        context: ThermalContext { hamiltonian: next_h, beta: ctx.beta, rho: DensityMatrix::new(rho)? },
        success_probability: exact_success,
        exact_success,
        first_order_success,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepLog {
    pub step: usize,
    pub epsilon: f64,
    pub exact_success: f64,
    pub first_order_success: f64,
}

/// How step failures are handled in [`chain_update`].
pub enum ChainMode<'a, R: Rng> {
    /// Every step succeeds; success probabilities are only recorded.
    Deterministic,
    /// Each step succeeds with its exact probability; a failure restarts the
    /// chain from the product state.
    MonteCarlo { rng: &'a mut R, max_restarts: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainResult {
    pub rho: DensityMatrix,
    pub hamiltonian: HermitianOperator,
    pub cumulative_success: f64,
    pub log: Vec<StepLog>,
    pub restarts: usize,
    pub attempted_steps: usize,
    /// False only if Monte-Carlo mode ran out of restarts.
    pub completed: bool,
}

/// Builds the Gibbs state of `H₁ + H₂ + h` from the product of subsystem
/// Gibbs states by switching on `h` in `⌈1/ε⌉` perturbative steps.
///
/// `H₁` acts on the low qubits and `H₂` on the qubits above it.
pub fn chain_update<R: Rng>(
    h1: &HermitianOperator,
    h2: &HermitianOperator,
    coupling: &HermitianOperator,
    beta: f64,
    epsilon: f64,
    mode: ChainMode<'_, R>,
) -> Result<ChainResult> {
    let n = h1.n_qubits() + h2.n_qubits();
    if coupling.n_qubits() != n {
        return Err(QsimError::DimensionMismatch { expected: n, found: coupling.n_qubits() });
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(QsimError::InvalidArgument(format!("step size must be in (0, 1], got {epsilon}")));
    }
    let start = {
        let a = exact_thermal(h1, beta)?;
        let b = exact_thermal(h2, beta)?;
        let h0 = HermitianOperator::identity(h2.n_qubits()).kron(h1).plus(&h2.kron(&HermitianOperator::identity(h1.n_qubits())))?;
        ThermalContext { hamiltonian: h0, beta, rho: b.rho.kron(&a.rho) }
    };
    let n_steps = (1.0 / epsilon - 1e-9).ceil() as usize;
    let step_sizes: Vec<f64> = (0..n_steps).map(|k| epsilon.min(1.0 - k as f64 * epsilon)).collect();

    let run = |ctx: &ThermalContext| -> Result<(Vec<UpdateOutcome>, Vec<StepLog>)> {
        let mut outs = Vec::with_capacity(n_steps);
        let mut log = Vec::with_capacity(n_steps);
        let mut cur = ctx.clone();
        for (step, &e) in step_sizes.iter().enumerate() {
            let out = perturbative_update(&cur, coupling, e, Dephasing::Exact)?;
            log.push(StepLog { step, epsilon: e, exact_success: out.exact_success, first_order_success: out.first_order_success });
            cur = out.context.clone();
            outs.push(out);
        }
        Ok((outs, log))
    };
    let (outs, log) = run(&start)?;
    let cumulative_success: f64 = log.iter().map(|l| l.exact_success).product();
    let last = outs.last().map(|o| o.context.clone()).unwrap_or(start);

    let (restarts, attempted_steps, completed) = match mode {
        ChainMode::Deterministic => (0, n_steps, true),
        ChainMode::MonteCarlo { rng, max_restarts } => {
            let mut restarts = 0;
            let mut attempted = 0;
            let mut done = false;
            'outer: while restarts <= max_restarts {
                for l in &log {
                    attempted += 1;
                    if rng.random::<f64>() >= l.exact_success {
                        restarts += 1;
                        continue 'outer;
                    }
                }
                done = true;
                break;
            }
            (restarts.min(max_restarts), attempted, done)
        }
    };
    Ok(ChainResult {
        rho: last.rho,
        hamiltonian: last.hamiltonian,
        cumulative_success,
        log,
        restarts,
        attempted_steps,
        completed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    /// `‖ρ(H + εh) − ρ(H)‖_Tr`
    pub lhs: f64,
    /// `εβ‖h‖`
    pub rhs: f64,
    /// `(εβ/Z) ‖∫₀¹ e^{−βH(1−λ)} h e^{−βHλ} dλ‖_Tr`
    pub dyson: f64,
}

impl BoundCheck {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + BOUND_SLACK && self.dyson <= self.rhs + BOUND_SLACK
    }
}

/// Numerical slack allowed when comparing against the bound.
pub const BOUND_SLACK: f64 = 1e-10;

const QUADRATURE_TOL: f64 = 1e-9;

/// Adaptive Simpson for a matrix-valued integrand, error measured entrywise.
fn matrix_simpson(f: &impl Fn(f64) -> Matrix, a: f64, b: f64, tol: f64, depth: u32) -> Result<Matrix> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (&fa + &fm * C64::new(4.0, 0.0) + &fb) * C64::new((b - a) / 6.0, 0.0);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> Matrix,
    a: f64,
    b: f64,
    fa: Matrix,
    fm: Matrix,
    fb: Matrix,
    whole: Matrix,
    tol: f64,
    depth: u32,
) -> Result<Matrix> {
    let m = 0.5 * (a + b);
    let (flm, frm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let four = C64::new(4.0, 0.0);
    let left = (&fa + &flm * four + &fm) * C64::new((m - a) / 6.0, 0.0);
    let right = (&fm + &frm * four + &fb) * C64::new((b - m) / 6.0, 0.0);
    let sum = &left + &right;
    let err = dense::max_abs_diff(&sum, &whole);
    if err <= 15.0 * tol {
        return Ok(&sum + (&sum - &whole) / C64::new(15.0, 0.0));
    }
    if depth == 0 {
        return Err(QsimError::Numerical(format!("quadrature did not converge (error {err:.3e})")));
    }
    Ok(simpson_step(f, a, m, fa, flm, fm.clone(), left, tol / 2.0, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// Checks `‖ρ(H+εh) − ρ(H)‖_Tr ≤ εβ‖h‖` and the same bound for the
/// first-order imaginary-time Dyson term.
pub fn verify_trace_norm_bound(h0: &HermitianOperator, h: &HermitianOperator, epsilon: f64, beta: f64) -> Result<BoundCheck> {
    let a = exact_thermal(h0, beta)?;
    let b = exact_thermal(&h0.plus(&h.scaled(epsilon))?, beta)?;
    let lhs = 2.0 * trace_distance(&b.rho, &a.rho)?;
    let rhs = epsilon.abs() * beta * h.spectral_norm();

    // shift energies so that e^{−βH} stays bounded; the 1/Z factor absorbs it
    let (vals, vecs) = h0.eigh();
    let e0 = vals[0];
    let z: f64 = vals.iter().map(|e| (-beta * (e - e0)).exp()).sum();
    let hv = vecs.adjoint() * h.matrix() * &vecs;
    let integrand = |lam: f64| {
        Matrix::from_fn(vals.len(), vals.len(), |i, j| {
            hv[(i, j)] * (-beta * (vals[i] - e0) * (1.0 - lam) - beta * (vals[j] - e0) * lam).exp()
        })
    };
    let integral = matrix_simpson(&integrand, 0.0, 1.0, QUADRATURE_TOL, 40)?;
    let dyson = epsilon.abs() * beta / z * dense::trace_norm(&integral);
    Ok(BoundCheck { lhs, rhs, dyson })
}

/// One line of the randomized bound report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundRecord {
    pub draw: usize,
    pub n_qubits: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub check: BoundCheck,
}

/// Random `(H, h)` pairs on 1..=`max_qubits` qubits with unit spectral norm,
/// checked for every `β` and `ε`. Draw `d` uses random stream `d` of `seed`.
pub fn randomized_bound_sweep(
    draws: usize,
    max_qubits: usize,
    betas: &[f64],
    epsilons: &[f64],
    seed: u64,
) -> Result<Vec<BoundRecord>> {
    let per_draw: Vec<Vec<BoundRecord>> = (0..draws)
        .into_par_iter()
        .map(|draw| {
            let mut rng = stream_rng(seed, draw as u64);
            let n = 1 + draw % max_qubits.max(1);
            let h0 = random_hermitian(n, 1.0, &mut rng);
            let h = random_hermitian(n, 1.0, &mut rng);
            let mut rows = Vec::with_capacity(betas.len() * epsilons.len());
            for &beta in betas {
                for &epsilon in epsilons {
                    let check = verify_trace_norm_bound(&h0, &h, epsilon, beta)?;
                    rows.push(BoundRecord { draw, n_qubits: n, beta, epsilon, check });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_draw.into_iter().flatten().collect())
}
