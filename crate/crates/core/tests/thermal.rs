use qsim_core::random::{random_hermitian, stream_rng};
use qsim_core::thermal::*;
use qsim_core::{HermitianOperator, Matrix, C64};

/// Scaling-and-squaring Taylor exponential of `-βH`, normalized to unit trace.
fn gibbs_oracle(h: &Matrix, beta: f64) -> Matrix {
    let d = h.nrows();
    let a = h * C64::new(-beta, 0.0);
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let small = &a / C64::new(2f64.powi(squarings), 0.0);
    let mut term = Matrix::identity(d, d);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &small / C64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    let tr = sum.trace();
    sum / tr
}

fn trace_norm(m: &Matrix) -> f64 {
    m.clone().singular_values().iter().sum()
}

fn z() -> HermitianOperator {
    HermitianOperator::pauli_z()
}

#[test]
fn exact_thermal_matches_series() {
    let mut rng = stream_rng(11, 0);
    for n in 1..=3 {
        let h = random_hermitian(n, 2.0, &mut rng);
        for beta in [0.1, 1.0, 3.0] {
            let ctx = exact_thermal(&h, beta).unwrap();
            let diff = ctx.rho.matrix() - gibbs_oracle(h.matrix(), beta);
            assert!(trace_norm(&diff) < 1e-10);
            let comm = ctx.rho.matrix() * h.matrix() - h.matrix() * ctx.rho.matrix();
            assert!(comm.iter().all(|x| x.norm() < 1e-10));
        }
    }
}

#[test]
fn chain_reaches_composite_gibbs_state() {
    let coupling = z().kron(&z()).scaled(0.5);
    let r = chain_update::<qsim_core::random::SimRng>(&z(), &z().scaled(0.7), &coupling, 1.0, 0.01, ChainMode::Deterministic)
        .unwrap();
    let total = HermitianOperator::identity(1)
        .kron(&z())
        .plus(&z().scaled(0.7).kron(&HermitianOperator::identity(1)))
        .unwrap()
        .plus(&coupling)
        .unwrap();
    let dist = 0.5 * trace_norm(&(r.rho.matrix() - gibbs_oracle(total.matrix(), 1.0)));
    assert!(dist <= 0.01, "trace distance {dist}");
    assert_eq!(r.log.len(), 100);
    let product: f64 = r.log.iter().map(|l| l.exact_success).product();
    assert!((product - r.cumulative_success).abs() < 1e-12);
    assert!(r.log.iter().all(|l| l.exact_success > 0.0 && l.exact_success <= 1.0));
}

#[test]
fn success_gap_is_second_order() {
    let coupling = z().kron(&z()).scaled(0.5);
    let start = exact_thermal(&z().kron(&HermitianOperator::identity(1)).plus(&HermitianOperator::identity(1).kron(&z())).unwrap(), 1.0)
        .unwrap();
    let ratios: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&e| {
            let out = perturbative_update(&start, &coupling, e, Dephasing::Exact).unwrap();
            (out.exact_success - out.first_order_success).abs() / (e * e)
        })
        .collect();
    assert!(ratios.windows(2).all(|w| (0.5..2.0).contains(&(w[1] / w[0]))), "{ratios:?}");
}

#[test]
fn cumulative_success_falls_with_beta() {
    // ⟨σᶻσᶻ⟩ > 0 for a ferromagnetic-ish pair, so larger β costs more
    let coupling = z().kron(&z()).scaled(0.5);
    let h1 = z().scaled(-1.0);
    let successes: Vec<f64> = [0.2, 0.5, 1.0, 1.5]
        .iter()
        .map(|&b| {
            chain_update::<qsim_core::random::SimRng>(&h1, &h1, &coupling, b, 0.05, ChainMode::Deterministic)
                .unwrap()
                .cumulative_success
        })
        .collect();
    assert!(successes.windows(2).all(|w| w[1] < w[0]), "{successes:?}");
}

#[test]
fn monte_carlo_chain_is_reproducible() {
    let coupling = z().kron(&z()).scaled(0.5);
    let run = || {
        let mut rng = stream_rng(5, 1);
        chain_update(&z(), &z(), &coupling, 1.0, 0.1, ChainMode::MonteCarlo { rng: &mut rng, max_restarts: 1000 }).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert!(a.completed);
    assert!(a.attempted_steps >= a.log.len());
}

#[test]
fn bound_holds_on_random_draws() {
    let rows = randomized_bound_sweep(30, 3, &[0.1, 1.0, 10.0], &[0.01, 0.1], 77).unwrap();
    for r in &rows {
        assert!(r.check.lhs <= r.check.rhs + BOUND_SLACK, "{r:?}");
        assert!(r.check.dyson <= r.check.rhs + BOUND_SLACK, "{r:?}");
    }
}

#[test]
fn dyson_term_matches_finite_difference() {
    // ∫ e^{−βH(1−λ)} h e^{−βHλ} dλ = −β⁻¹ ∂ₛ e^{−β(H+sh)} at s = 0
    let mut rng = stream_rng(12, 0);
    let h0 = random_hermitian(2, 1.0, &mut rng);
    let h = random_hermitian(2, 1.0, &mut rng);
    let (beta, eps, step) = (1.3, 0.05, 1e-4);
    let c = verify_trace_norm_bound(&h0, &h, eps, beta).unwrap();
    let unnormalized = |s: f64| {
        let g = gibbs_oracle(h0.plus(&h.scaled(s)).unwrap().matrix(), beta);
        let z: f64 = h0.plus(&h.scaled(s)).unwrap().eigenvalues().iter().map(|e| (-beta * e).exp()).sum();
        g * C64::new(z, 0.0)
    };
    let z0: f64 = h0.eigenvalues().iter().map(|e| (-beta * e).exp()).sum();
    let derivative = (unnormalized(step) - unnormalized(-step)) / C64::new(2.0 * step, 0.0);
    let expected = eps / z0 * trace_norm(&derivative);
    assert!((expected - c.dyson).abs() < 1e-7, "{expected} vs {}", c.dyson);
}

#[test]
fn update_rejects_strong_coupling() {
    let ctx = exact_thermal(&z(), 4.0).unwrap();
    assert!(perturbative_update(&ctx, &HermitianOperator::pauli_x(), 0.3, Dephasing::Exact).is_err());
    assert!(perturbative_update(&ctx, &HermitianOperator::pauli_x(), 0.2, Dephasing::Exact).is_ok());
}
