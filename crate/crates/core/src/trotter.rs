//! Suzuki–Trotter product formulas.
//!
//! Plans are built symbolically as `(term, duration)` sequences, merged, and
//! then executed with dense exponentials of each term on its support.

use std::collections::HashMap;

use rand::Rng;

use crate::dense::{self, Matrix, C64};
use crate::error::{QsimError, Result};
use crate::operators::HermitianOperator;
use crate::random::random_hermitian;
use crate::state::{apply_matrix_columns, StateVector};

/// One local piece `H_i` of `H = Σ H_i`.
#[derive(Clone, Debug)]
pub struct HamiltonianTerm {
    support: Vec<usize>,
    op: HermitianOperator,
    label: String,
}

impl HamiltonianTerm {
    pub fn new(label: impl Into<String>, support: Vec<usize>, op: HermitianOperator) -> Result<Self> {
        if op.n_qubits() != support.len() {
            return Err(QsimError::ArityMismatch { arity: op.n_qubits(), targets: support.len() });
        }
        for (i, q) in support.iter().enumerate() {
            if support[..i].contains(q) {
                return Err(QsimError::OverlappingQubits(*q));
            }
        }
        Ok(Self { support, op, label: label.into() })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanStep {
    pub term: usize,
    pub duration: f64,
}

/// Ordered exponentials realizing a product formula.
#[derive(Clone, Debug, PartialEq)]
pub struct TrotterPlan {
    steps: Vec<PlanStep>,
    order: u32,
    slices: usize,
    n_terms: usize,
    time: f64,
}

/// Suzuki coefficient `z_k = (4 − 4^{1/(2k−1)})^{−1}` for `k ≥ 2`.
pub fn suzuki_z(k: u32) -> Result<f64> {
    if k < 2 {
        return Err(QsimError::InvalidArgument(format!("Suzuki coefficient needs k >= 2, got {k}")));
    }
    Ok(1.0 / (4.0 - 4f64.powf(1.0 / (2 * k - 1) as f64)))
}

/// Exponentials in one merged `S_{2k}` approximant over `m` terms.
pub fn exponential_count(m: usize, k: u32) -> usize {
    if m == 0 {
        return 0;
    }
    2 * (m - 1) * 5usize.pow(k.saturating_sub(1)) + 1
}

fn symmetric_product(k: u32, x: f64, m: usize, out: &mut Vec<PlanStep>) -> Result<()> {
    if k == 1 {
        for term in 0..m - 1 {
            out.push(PlanStep { term, duration: x / 2.0 });
        }
        out.push(PlanStep { term: m - 1, duration: x });
        for term in (0..m - 1).rev() {
            out.push(PlanStep { term, duration: x / 2.0 });
        }
        return Ok(());
    }
    let z = suzuki_z(k)?;
    for w in [z, z, 1.0 - 4.0 * z, z, z] {
        symmetric_product(k - 1, w * x, m, out)?;
    }
    Ok(())
}

fn merge(steps: Vec<PlanStep>) -> Vec<PlanStep> {
    let mut merged: Vec<PlanStep> = Vec::with_capacity(steps.len());
    for s in steps {
        match merged.last_mut() {
            Some(last) if last.term == s.term => last.duration += s.duration,
            _ => merged.push(s),
        }
    }
    merged
}

impl TrotterPlan {
    /// `order` is 1 or an even number `2k`.
    pub fn new(n_terms: usize, t: f64, order: u32, slices: usize) -> Result<Self> {
        if n_terms == 0 {
            return Err(QsimError::InvalidArgument("empty term list".into()));
        }
        if slices == 0 {
            return Err(QsimError::InvalidArgument("slice count must be at least 1".into()));
        }
        if order == 0 || (order > 1 && order % 2 == 1) {
            return Err(QsimError::InvalidArgument(format!("order must be 1 or even, got {order}")));
        }
        let dt = t / slices as f64;
        let mut one_slice = Vec::new();
        if order == 1 {
            one_slice.extend((0..n_terms).map(|term| PlanStep { term, duration: dt }));
        } else {
            symmetric_product(order / 2, dt, n_terms, &mut one_slice)?;
        }
        let mut steps = Vec::with_capacity(one_slice.len() * slices);
        for _ in 0..slices {
            steps.extend_from_slice(&one_slice);
        }
        Ok(Self { steps: merge(steps), order, slices, n_terms, time: t })
    }

    pub fn steps(&self) -> &[PlanStep] {
        &self.steps
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn exponential_count(&self) -> usize {
        self.steps.len()
    }

    /// Signed total duration assigned to each term.
    pub fn durations_per_term(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_terms];
        for s in &self.steps {
            d[s.term] += s.duration;
        }
        d
    }
}

pub fn build_plan(terms: &[HamiltonianTerm], t: f64, order: u32, slices: usize) -> Result<TrotterPlan> {
    TrotterPlan::new(terms.len(), t, order, slices)
}

/// Cached eigendecompositions of each term, for fast exponentials.
pub struct TermPropagators<'a> {
    terms: &'a [HamiltonianTerm],
    eig: Vec<(Vec<f64>, Matrix)>,
    cache: HashMap<(usize, u64), Matrix>,
}

impl<'a> TermPropagators<'a> {
    pub fn new(terms: &'a [HamiltonianTerm]) -> Self {
        let eig = terms.iter().map(|t| t.op.eigh()).collect();
        Self { terms, eig, cache: HashMap::new() }
    }

    /// `exp(−i H_term t)` on the term's support.
    pub fn propagator(&mut self, term: usize, t: f64) -> &Matrix {
        let (vals, vecs) = &self.eig[term];
        self.cache
            .entry((term, t.to_bits()))
            .or_insert_with(|| dense::from_spectrum(vals, vecs, |e| C64::from_polar(1.0, -e * t)))
    }

    fn check_supports(&self, n_qubits: usize) -> Result<()> {
        for term in self.terms {
            if let Some(&q) = term.support.iter().find(|&&q| q >= n_qubits) {
                return Err(QsimError::QubitOutOfRange { qubit: q, n_qubits });
            }
        }
        Ok(())
    }
}

fn check_plan(plan: &TrotterPlan, terms: &[HamiltonianTerm]) -> Result<()> {
    if plan.n_terms != terms.len() {
        return Err(QsimError::DimensionMismatch { expected: plan.n_terms, found: terms.len() });
    }
    Ok(())
}

/// Applies the plan's exponentials to `state` in order.
pub fn execute_plan(state: &mut StateVector, plan: &TrotterPlan, terms: &[HamiltonianTerm]) -> Result<()> {
    check_plan(plan, terms)?;
    let mut props = TermPropagators::new(terms);
    props.check_supports(state.n_qubits())?;
    for step in &plan.steps {
        let u = props.propagator(step.term, step.duration).clone();
        state.apply_matrix(&u, &terms[step.term].support, &[])?;
    }
    Ok(())
}

/// Dense unitary of the whole plan on `n_qubits`.
pub fn plan_unitary(plan: &TrotterPlan, terms: &[HamiltonianTerm], n_qubits: usize) -> Result<Matrix> {
    check_plan(plan, terms)?;
    dense::guard_dimension(1 << n_qubits)?;
    let mut props = TermPropagators::new(terms);
    props.check_supports(n_qubits)?;
    let mut u = dense::identity(1 << n_qubits);
    for step in &plan.steps {
        let p = props.propagator(step.term, step.duration).clone();
        apply_matrix_columns(&mut u, &p, &terms[step.term].support, &[]);
    }
    Ok(u)
}

/// `Σ H_i` embedded on `n_qubits`.
pub fn total_hamiltonian(terms: &[HamiltonianTerm], n_qubits: usize) -> Result<HermitianOperator> {
    let mut total = HermitianOperator::zeros(n_qubits);
    for t in terms {
        total = total.plus(&t.op.embed(&t.support, n_qubits)?)?;
    }
    Ok(total)
}

/// Maximum register size for dense error measurement.
pub const ERROR_QUBIT_LIMIT: usize = 10;

/// Spectral-norm distance between the plan and `exp(−iHt)`.
pub fn plan_error(terms: &[HamiltonianTerm], n_qubits: usize, plan: &TrotterPlan) -> Result<f64> {
    if n_qubits > ERROR_QUBIT_LIMIT {
        return Err(QsimError::DimensionTooLarge { n_qubits, limit: ERROR_QUBIT_LIMIT });
    }
    let exact = total_hamiltonian(terms, n_qubits)?.exp(C64::new(0.0, -plan.time))?;
    Ok(dense::spectral_norm(&(plan_unitary(plan, terms, n_qubits)? - exact)))
}

/// Result of [`select_order`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderChoice {
    /// Half order `k` of the chosen `S_{2k}`.
    pub half_order: u32,
    pub slices: usize,
    pub exponentials: usize,
    pub error: f64,
}

const MAX_SLICES: usize = 1 << 16;

fn minimal_slices(terms: &[HamiltonianTerm], n_qubits: usize, t: f64, order: u32, target: f64) -> Result<Option<(usize, f64)>> {
    let err = |n: usize| -> Result<f64> { plan_error(terms, n_qubits, &TrotterPlan::new(terms.len(), t, order, n)?) };
    let e1 = err(1)?;
    if e1 <= target {
        return Ok(Some((1, e1)));
    }
    let mut hi = 2;
    let mut e_hi = err(hi)?;
    while e_hi > target {
        if hi >= MAX_SLICES {
            return Ok(None);
        }
        hi *= 2;
        e_hi = err(hi)?;
    }
    let mut lo = hi / 2; // fails
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let e = err(mid)?;
        if e <= target {
            hi = mid;
            e_hi = e;
        } else {
            lo = mid;
        }
    }
    Ok(Some((hi, e_hi)))
}

/// Sweeps `S_{2k}` for `k ∈ 1..=4`, finds the minimal slice count meeting
/// `target_error` for each, and returns the cheapest in exponentials.
pub fn select_order(terms: &[HamiltonianTerm], n_qubits: usize, t: f64, target_error: f64) -> Result<OrderChoice> {
    if !(target_error > 0.0) {
        return Err(QsimError::InvalidArgument(format!("target error must be positive, got {target_error}")));
    }
    let mut best: Option<OrderChoice> = None;
    for k in 1..=4u32 {
        let Some((slices, error)) = minimal_slices(terms, n_qubits, t, 2 * k, target_error)? else {
            continue;
        };
        let exponentials = TrotterPlan::new(terms.len(), t, 2 * k, slices)?.exponential_count();
        let choice = OrderChoice { half_order: k, slices, exponentials, error };
        if best.is_none_or(|b| exponentials < b.exponentials) {
            best = Some(choice);
        }
    }
    best.ok_or_else(|| QsimError::Numerical(format!("target error {target_error:e} unreachable within {MAX_SLICES} slices")))
}

/// Random 2-local Hamiltonian: one random two-qubit term of unit norm per
/// qubit pair.
pub fn random_two_local(n_qubits: usize, rng: &mut impl Rng) -> Vec<HamiltonianTerm> {
    let mut terms = Vec::new();
    for a in 0..n_qubits {
        for b in a + 1..n_qubits {
            let op = random_hermitian(2, 1.0, rng);
            terms.push(HamiltonianTerm::new(format!("h{a}{b}"), vec![a, b], op).expect("valid support"));
        }
    }
    terms
}

/// Least-squares slope of `log(err)` against `log(dt)`.
pub fn log_log_slope(dts: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
