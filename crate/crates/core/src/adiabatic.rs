//! Adiabatic evolution along `H(s) = (1 − s)H_i + s H_f`, spectral
//! diagnostics of the path, and the probe-qubit eigenvalue measurement.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::dense::{self, C64};
use crate::error::{QsimError, Result};
use crate::gates::{standard_gate, StandardGate};
use crate::metrics::fidelity;
use crate::numeric::golden_section_min;
use crate::operators::HermitianOperator;
use crate::state::StateVector;

type ScheduleFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Monotone map `u = t/T ↦ s` with `s(0) = 0` and `s(1) = 1`.
#[derive(Clone)]
pub struct Schedule {
    f: Option<ScheduleFn>,
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.f.is_none() { "Schedule::Linear" } else { "Schedule::Custom" })
    }
}

const SCHEDULE_CHECK_POINTS: usize = 1000;

impl Schedule {
    pub fn linear() -> Self {
        Self { f: None }
    }

    /// Validates the endpoints and monotonicity on a fine grid.
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if f(0.0).abs() > 1e-12 || (f(1.0) - 1.0).abs() > 1e-12 {
            return Err(QsimError::InvalidArgument("schedule must satisfy s(0) = 0 and s(1) = 1".into()));
        }
        let mut prev = 0.0;
        for i in 1..=SCHEDULE_CHECK_POINTS {
            let s = f(i as f64 / SCHEDULE_CHECK_POINTS as f64);
            if !s.is_finite() || s < prev - 1e-15 {
                return Err(QsimError::InvalidArgument("schedule must be monotone nondecreasing".into()));
            }
            prev = s;
        }
        Ok(Self { f: Some(Arc::new(f)) })
    }

    pub fn eval(&self, u: f64) -> f64 {
        match &self.f {
            None => u,
            Some(f) => f(u),
        }
    }

    /// Largest `|ds/du|`, estimated by finite differences.
    pub fn max_slope(&self) -> f64 {
        if self.f.is_none() {
            return 1.0;
        }
        let h = 1.0 / SCHEDULE_CHECK_POINTS as f64;
        (0..SCHEDULE_CHECK_POINTS)
            .map(|i| ((self.eval((i + 1) as f64 * h) - self.eval(i as f64 * h)) / h).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct Interpolation {
    pub h_i: HermitianOperator,
    pub h_f: HermitianOperator,
    pub schedule: Schedule,
}

impl Interpolation {
    pub fn new(h_i: HermitianOperator, h_f: HermitianOperator, schedule: Schedule) -> Result<Self> {
        if h_i.n_qubits() != h_f.n_qubits() {
            return Err(QsimError::DimensionMismatch { expected: h_i.n_qubits(), found: h_f.n_qubits() });
        }
        Ok(Self { h_i, h_f, schedule })
    }

    pub fn linear(h_i: HermitianOperator, h_f: HermitianOperator) -> Result<Self> {
        Self::new(h_i, h_f, Schedule::linear())
    }

    pub fn n_qubits(&self) -> usize {
        self.h_i.n_qubits()
    }

    /// `H(s)` at interpolation parameter `s`.
    pub fn at(&self, s: f64) -> HermitianOperator {
        self.h_i.scaled(1.0 - s).plus(&self.h_f.scaled(s)).expect("same dimension")
    }

    /// `H(s(u))` at normalized time `u = t/T`.
    pub fn at_time(&self, u: f64) -> HermitianOperator {
        self.at(self.schedule.eval(u))
    }

    fn lowest_two(&self, s: f64) -> Result<(f64, f64)> {
        let ev = self.at(s).eigenvalues();
        if ev.len() < 2 {
            return Err(QsimError::InvalidArgument("gap needs at least two levels".into()));
        }
        Ok((ev[0], ev[1]))
    }

    fn ground(&self, s: f64) -> Result<StateVector> {
        let (vals, vecs) = self.at(s).eigh();
        let gap = vals[1] - vals[0];
        if gap < DEGENERACY_TOL {
            return Err(QsimError::Degenerate { s, gap });
        }
        StateVector::from_amplitudes(vecs.column(0).iter().cloned().collect())
    }
}

/// Gaps below this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct AdiabaticRun {
    pub state: StateVector,
    /// Largest `‖H‖·δt` bound used by the step check.
    pub step_phase: f64,
}

/// Midpoint-rule propagation: `steps` factors `exp(−iH(s(u_mid))δt)`.
///
/// Fails if a single step could rotate phases by more than π, which would
/// make the result meaningless.
pub fn evolve_adiabatic(start: &StateVector, interp: &Interpolation, total_time: f64, steps: usize) -> Result<AdiabaticRun> {
    if (start.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(QsimError::NotNormalized(start.norm_sqr()));
    }
    if start.n_qubits() != interp.n_qubits() {
        return Err(QsimError::DimensionMismatch { expected: interp.n_qubits(), found: start.n_qubits() });
    }
    if steps == 0 || !(total_time >= 0.0) {
        return Err(QsimError::InvalidArgument(format!("need steps >= 1 and T >= 0, got {steps}, {total_time}")));
    }
    let dt = total_time / steps as f64;
    let step_phase = interp.h_i.spectral_norm().max(interp.h_f.spectral_norm()) * dt;
    if step_phase > PI {
        return Err(QsimError::Precondition(format!(
            "{steps} steps are too few for T = {total_time}: a single step spans phase {step_phase:.3}"
        )));
    }
    let mut state = start.clone();
    if dt > 0.0 {
        for k in 0..steps {
            let h = interp.at_time((k as f64 + 0.5) / steps as f64);
            state.apply_dense(&h.exp(C64::new(0.0, -dt))?)?;
        }
    }
    let drift = (state.norm_sqr() - 1.0).abs();
    if drift > 1e-8 {
        return Err(QsimError::Numerical(format!("norm drifted by {drift:e}")));
    }
    Ok(AdiabaticRun { state, step_phase })
}

/// Fidelity of the evolved initial ground state with the final ground state.
pub fn final_fidelity(interp: &Interpolation, total_time: f64, steps: usize) -> Result<f64> {
    let start = interp.ground(0.0)?;
    let target = interp.ground(1.0)?;
    let run = evolve_adiabatic(&start, interp, total_time, steps)?;
    fidelity(&run.state, &target)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralTrace {
    pub s: Vec<f64>,
    pub e0: Vec<f64>,
    pub e1: Vec<f64>,
    pub gap: Vec<f64>,
    pub delta_min: f64,
    pub s_min: f64,
}

/// Ground and first excited energies on a uniform `s` grid, doubled until
/// the minimum gap changes by less than 1%, then polished by golden-section
/// search around the grid minimum.
pub fn spectral_trace(interp: &Interpolation, points: usize) -> Result<SpectralTrace> {
    if interp.n_qubits() > 10 {
        return Err(QsimError::DimensionTooLarge { n_qubits: interp.n_qubits(), limit: 10 });
    }
    let mut n = points.max(3);
    let mut prev: Option<f64> = None;
    loop {
        let s: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let mut e0 = Vec::with_capacity(n);
        let mut e1 = Vec::with_capacity(n);
        for &x in &s {
            let (a, b) = interp.lowest_two(x)?;
            e0.push(a);
            e1.push(b);
        }
        let gap: Vec<f64> = e0.iter().zip(&e1).map(|(a, b)| b - a).collect();
        let (imin, &gmin) = gap.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty");
        let converged = prev.is_some_and(|p| (p - gmin).abs() <= 0.01 * p.abs().max(1e-300));
        if converged || n > 1 << 14 {
            let lo = s[imin.saturating_sub(1)];
            let hi = s[(imin + 1).min(n - 1)];
            let (s_min, polished) = golden_section_min(
                |x| interp.lowest_two(x).map(|(a, b)| b - a).unwrap_or(f64::INFINITY),
                lo,
                hi,
                1e-12,
            );
            let (delta_min, s_min) = if polished < gmin { (polished, s_min) } else { (gmin, s[imin]) };
            if delta_min < DEGENERACY_TOL {
                return Err(QsimError::Degenerate { s: s_min, gap: delta_min });
            }
            return Ok(SpectralTrace { s, e0, e1, gap, delta_min, s_min });
        }
        prev = Some(gmin);
        n = 2 * n - 1;
    }
}

/// Discrete geodesic length `Σ arccos|⟨g(s_i)|g(s_{i+1})⟩|` of the ground
/// state along `s(u)` on a uniform `u` grid, doubled until it changes by less
/// than `tol`.
pub fn path_length(interp: &Interpolation, points: usize, tol: f64) -> Result<f64> {
    let mut n = points.max(2);
    let mut prev: Option<f64> = None;
    loop {
        let grounds: Vec<StateVector> =
            (0..n).map(|i| interp.ground(interp.schedule.eval(i as f64 / (n - 1) as f64))).collect::<Result<_>>()?;
        let mut total = 0.0;
        for w in grounds.windows(2) {
            total += w[0].inner(&w[1])?.norm().min(1.0).acos();
        }
        if prev.is_some_and(|p| (p - total).abs() < tol) || n > 1 << 16 {
            return Ok(total);
        }
        prev = Some(total);
        n = 2 * n - 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeBounds {
    /// `‖∂_s H‖ / Δ_min²`
    pub t_gap2: f64,
    /// `𝓛² / Δ_min`
    pub t_path2: f64,
    /// `𝓛 / Δ_min`
    pub t_path1: f64,
}

pub fn time_bounds(trace: &SpectralTrace, interp: &Interpolation, path_len: f64) -> Result<TimeBounds> {
    if !(trace.delta_min > 0.0) {
        return Err(QsimError::Degenerate { s: trace.s_min, gap: trace.delta_min });
    }
    let diff = interp.h_f.plus(&interp.h_i.scaled(-1.0))?;
    let dh = diff.spectral_norm() * interp.schedule.max_slope();
    Ok(TimeBounds {
        t_gap2: dh / trace.delta_min.powi(2),
        t_path2: path_len * path_len / trace.delta_min,
        t_path1: path_len / trace.delta_min,
    })
}

#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub a0: f64,
    pub omega: f64,
    pub times: Vec<f64>,
    /// Exact probe `|0⟩` probabilities.
    pub p0: Vec<f64>,
    pub max_residual: f64,
    /// Smallest post-measurement system fidelity over all samples.
    pub min_fidelity: f64,
    /// System state after the final probe readout.
    pub state: StateVector,
}

/// Eigenvalue readout of an observable `A` commuting with `H_f` through a
/// probe qubit.
///
/// The probe (qubit `n`, above the system) starts in `|0⟩`, is Hadamard
/// rotated, evolved for `t` under `H_f + δ|1⟩⟨1| + A⊗|1⟩⟨1|`, rotated back and
/// read out. `P₀(t) = ½(1 + cos ωt)` with `ω = a₀ + δ`; `ω` is fitted from the
/// exact probabilities at `times`.
pub fn nondestructive_measure(
    system_ground: &StateVector,
    h_f: &HermitianOperator,
    a: &HermitianOperator,
    delta: f64,
    times: &[f64],
    samples: &mut impl FnMut() -> f64,
) -> Result<ProbeResult> {
    let n = system_ground.n_qubits();
    if h_f.n_qubits() != n || a.n_qubits() != n {
        return Err(QsimError::DimensionMismatch { expected: n, found: h_f.n_qubits().max(a.n_qubits()) });
    }
    let comm = a.commutator_norm(h_f)?;
    if comm > 1e-10 {
        return Err(QsimError::Precondition(format!("A does not commute with H_f (‖[A,H]‖ = {comm:.3e})")));
    }
    if times.len() < 3 || times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(QsimError::InvalidArgument("need at least three finite nonnegative sample times".into()));
    }
    let p1 = HermitianOperator::from_diagonal(&[0.0, 1.0])?;
    let id1 = HermitianOperator::identity(1);
    let h_tot = id1
        .kron(h_f)
        .plus(&p1.kron(a))?
        .plus(&p1.kron(&HermitianOperator::identity(n)).scaled(delta))?;
    let (vals, vecs) = h_tot.eigh();
    let had = standard_gate(StandardGate::H)?;
    let probe0 = StateVector::zero(1);
    let probe1 = StateVector::basis(1, 1)?;

    let mut p0 = Vec::with_capacity(times.len());
    let mut min_fidelity: f64 = 1.0;
    let mut last = system_ground.clone();
    for &t in times {
        let mut s = system_ground.tensor(&probe0);
        s.apply(&had, &[n], &[])?;
        s.apply_dense(&dense::from_spectrum(&vals, &vecs, |e| C64::from_polar(1.0, -e * t)))?;
        s.apply(&had, &[n], &[])?;
        let m = s.measure_qubit(n, samples())?;
        p0.push(m.p0);
        let (sys, _) = s.split_off_upper(if m.outcome == 0 { &probe0 } else { &probe1 })?;
        min_fidelity = min_fidelity.min(fidelity(&sys, system_ground)?);
        last = sys;
    }
    let omega = fit_cosine_frequency(times, &p0);
    let max_residual = times
        .iter()
        .zip(&p0)
        .map(|(t, p)| (p - 0.5 * (1.0 + (omega * t).cos())).abs())
        .fold(0.0, f64::max);
    if max_residual > 1e-8 {
        return Err(QsimError::Numerical(format!(
            "probe fit residual {max_residual:.3e}; the sampling may alias ω, resample times"
        )));
    }
    Ok(ProbeResult { a0: omega - delta, omega, times: times.to_vec(), p0, max_residual, min_fidelity, state: last })
}

/// Least-squares `ω ≥ 0` for `p(t) = ½(1 + cos ωt)`: grid search up to the
/// sampling Nyquist frequency, then Gauss–Newton refinement.
pub fn fit_cosine_frequency(times: &[f64], p: &[f64]) -> f64 {
    let sse = |w: f64| -> f64 { times.iter().zip(p).map(|(t, y)| (y - 0.5 * (1.0 + (w * t).cos())).powi(2)).sum() };
    let mut sorted: Vec<f64> = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    let span = sorted[sorted.len() - 1] - sorted[0];
    let dt_min = sorted.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
    let w_max = PI / dt_min;
    let step = PI / (8.0 * span);
    let n_grid = (w_max / step).ceil() as usize + 1;
    let mut best = (0.0, sse(0.0));
    for k in 1..=n_grid {
        let w = k as f64 * step;
        let e = sse(w);
        if e < best.1 {
            best = (w, e);
        }
    }
    let mut w = best.0;
    for _ in 0..50 {
        let (mut jr, mut jj) = (0.0, 0.0);
        for (t, y) in times.iter().zip(p) {
            let r = y - 0.5 * (1.0 + (w * t).cos());
            let j = 0.5 * t * (w * t).sin();
            jr += j * r;
            jj += j * j;
        }
        if jj == 0.0 {
            break;
        }
        let dw = -jr / jj;
        w += dw;
        if dw.abs() < 1e-15 * w.abs().max(1.0) {
            break;
        }
    }
    w.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::transverse_ising;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn sweep() -> Interpolation {
        Interpolation::linear(HermitianOperator::pauli_x().scaled(-1.0), HermitianOperator::pauli_z().scaled(-1.0)).unwrap()
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::custom(|u| u * u).is_ok());
        assert!(Schedule::custom(|u| u * 0.5).is_err());
        assert!(Schedule::custom(|u| (u * 6.0).sin().abs().min(1.0) * u).is_err());
        assert_abs_diff_eq!(Schedule::custom(|u| u * u).unwrap().max_slope(), 2.0, epsilon = 1e-2);
    }

    #[test]
    fn stationary_when_endpoints_agree() {
        let h = transverse_ising(2, 1.0, 0.7).unwrap();
        let interp = Interpolation::linear(h.clone(), h).unwrap();
        for t in [0.0, 1.0, 10.0] {
            assert_abs_diff_eq!(final_fidelity(&interp, t, 200).unwrap(), 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(path_length(&interp, 16, 1e-8).unwrap(), 0.0, epsilon = 1e-7);
        let tr = spectral_trace(&interp, 9).unwrap();
        assert!(tr.gap.iter().all(|g| (g - tr.gap[0]).abs() < 1e-12));
    }

    #[test]
    fn slow_and_sudden_limits() {
        let interp = sweep();
        assert!(final_fidelity(&interp, 50.0, 5000).unwrap() >= 0.999);
        // |+⟩ against |0⟩: Bloch vectors 90° apart, so the overlap is cos²(π/4)
        let sudden = final_fidelity(&interp, 0.0, 1).unwrap();
        assert_abs_diff_eq!(sudden, FRAC_PI_4.cos().powi(2), epsilon = 1e-12);
        assert!(matches!(evolve_adiabatic(&StateVector::zero(1), &interp, 100.0, 10), Err(QsimError::Precondition(_))));
    }

    #[test]
    fn gap_and_path_of_the_quarter_turn() {
        let interp = sweep();
        let tr = spectral_trace(&interp, 11).unwrap();
        for (s, g) in tr.s.iter().zip(&tr.gap) {
            assert_abs_diff_eq!(*g, 2.0 * ((1.0 - s).powi(2) + s * s).sqrt(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(tr.delta_min, SQRT_2, epsilon = 1e-9);
        assert!(tr.delta_min <= tr.gap[0] && tr.delta_min <= *tr.gap.last().unwrap());
        let l = path_length(&interp, 8, 1e-6).unwrap();
        assert_abs_diff_eq!(l, FRAC_PI_4, epsilon = 1e-6);
        let curved = Interpolation::new(interp.h_i.clone(), interp.h_f.clone(), Schedule::custom(|u| u * u * (3.0 - 2.0 * u)).unwrap()).unwrap();
        assert_abs_diff_eq!(path_length(&curved, 8, 1e-9).unwrap(), l, epsilon = 1e-6);
    }

    #[test]
    fn bounds() {
        let interp = sweep();
        let tr = spectral_trace(&interp, 11).unwrap();
        let l = path_length(&interp, 8, 1e-8).unwrap();
        let b = time_bounds(&tr, &interp, l).unwrap();
        assert_abs_diff_eq!(b.t_gap2, SQRT_2 / 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(b.t_path1, FRAC_PI_4 / SQRT_2, epsilon = 1e-6);
        // L < 1 here, so the squared-length bound is the smaller one
        assert!(b.t_path2 < b.t_path1);
    }

    #[test]
    fn degenerate_paths_are_reported() {
        let z = HermitianOperator::pauli_z();
        let interp = Interpolation::linear(z.clone(), z.scaled(-1.0)).unwrap();
        assert!(matches!(spectral_trace(&interp, 11), Err(QsimError::Degenerate { .. })));
        assert!(matches!(path_length(&interp, 11, 1e-6), Err(QsimError::Degenerate { .. })));
    }

    #[test]
    fn probe_recovers_identity_eigenvalue() {
        let h = transverse_ising(2, 1.0, 0.5).unwrap();
        let (_, g) = h.ground_state();
        let times: Vec<f64> = (0..40).map(|k| 0.25 * k as f64).collect();
        let mut u = 0.0;
        let mut samples = || {
            u = (u + 0.618_033_988_7) % 1.0;
            u
        };
        let r = nondestructive_measure(&g, &h, &HermitianOperator::identity(2), 0.5, &times, &mut samples).unwrap();
        assert_abs_diff_eq!(r.p0[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.a0, 1.0, epsilon = 1e-6);
        assert!(r.min_fidelity >= 1.0 - 1e-10);
        let bad = HermitianOperator::pauli_x().kron(&HermitianOperator::identity(1));
        assert!(nondestructive_measure(&g, &h, &bad, 0.5, &times, &mut samples).is_err());
    }
}
