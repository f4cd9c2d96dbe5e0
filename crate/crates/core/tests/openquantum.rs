use qsim_core::dense::{self, Matrix};
use qsim_core::openquantum::*;
use qsim_core::random::{random_state, stream_rng};
use qsim_core::{metrics::trace_distance, DensityMatrix, HermitianOperator, StateVector, C64};

/// Right-hand side written directly in operator form.
fn rhs(h: &Matrix, rates: &Matrix, ops: &[Matrix], rho: &Matrix) -> Matrix {
    let mi = C64::new(0.0, -1.0);
    let mut out = (h * rho - rho * h) * mi;
    for (a, la) in ops.iter().enumerate() {
        for (b, lb) in ops.iter().enumerate() {
            let lbd = lb.adjoint();
            let c1 = la * rho * &lbd - &lbd * la * rho;
            let c2 = la * rho * &lbd - rho * &lbd * la;
            out += (c1 + c2) * rates[(a, b)];
        }
    }
    out
}

/// Classical RK4 with a fine fixed step.
fn rk4(model: &LindbladModel, rho0: &Matrix, t: f64) -> Matrix {
    let steps = 4000;
    let dt = t / steps as f64;
    let f = |r: &Matrix| rhs(model.hamiltonian().matrix(), model.rates(), model.operators(), r);
    let mut r = rho0.clone();
    let c = |x: f64| C64::new(x, 0.0);
    for _ in 0..steps {
        let k1 = f(&r);
        let k2 = f(&(&r + &k1 * c(dt / 2.0)));
        let k3 = f(&(&r + &k2 * c(dt / 2.0)));
        let k4 = f(&(&r + &k3 * c(dt)));
        r += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(dt / 6.0);
    }
    r
}

fn sigma_minus() -> Matrix {
    Matrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)])
}

/// Driven, damped and dephased qubit with correlated (non-diagonal) rates.
fn qubit_model() -> LindbladModel {
    let h = HermitianOperator::pauli_x().scaled(0.7).plus(&HermitianOperator::pauli_z().scaled(0.4)).unwrap();
    let rates = Matrix::from_row_slice(2, 2, &[C64::new(0.3, 0.0), C64::new(0.05, 0.02), C64::new(0.05, -0.02), C64::new(0.2, 0.0)]);
    let z = dense::pauli_z() * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    LindbladModel::new(h, rates, vec![sigma_minus(), z]).unwrap()
}

#[test]
fn superoperator_matches_operator_form_ode() {
    let model = qubit_model();
    let rho0 = DensityMatrix::from_pure(&random_state(1, &mut stream_rng(31, 0)));
    let exact = propagate_exact(&model, &rho0, 1.5).unwrap();
    let oracle = rk4(&model, rho0.matrix(), 1.5);
    assert!(dense::max_abs_diff(exact.matrix(), &oracle) < 1e-10);
}

#[test]
fn two_qubit_generator_matches_operator_form() {
    let mut rng = stream_rng(32, 0);
    let h = qsim_core::random::random_hermitian(2, 1.0, &mut rng);
    let ops = vec![dense::kron(&dense::identity(2), &sigma_minus()), dense::kron(&sigma_minus(), &dense::pauli_x())];
    let model = LindbladModel::diagonal(h, &[0.3, 0.1], ops).unwrap();
    let rho = DensityMatrix::from_pure(&random_state(2, &mut rng));
    let via_super = build_lindbladian(&model) * rho.vectorize();
    let direct = rhs(model.hamiltonian().matrix(), model.rates(), model.operators(), rho.matrix());
    let direct_vec = nalgebra::DVector::from_column_slice(direct.as_slice());
    assert!((via_super - direct_vec).iter().all(|z| z.norm() < 1e-13));
}

#[test]
fn trace_preserved_over_long_times() {
    let model = LindbladModel::dephasing(2, 1, 0.4).unwrap();
    let rho0 = DensityMatrix::from_pure(&StateVector::uniform(2));
    for t in [0.1, 1.0, 10.0] {
        let r = propagate_exact(&model, &rho0, t).unwrap();
        assert!((r.matrix().trace().re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn commuting_generators_split_exactly() {
    let a = LindbladModel::dephasing(2, 0, 0.3).unwrap();
    let b = LindbladModel::dephasing(2, 1, 0.6).unwrap();
    let both = LindbladModel::diagonal(
        HermitianOperator::zeros(2),
        &[0.3, 0.6],
        vec![a.operators()[0].clone(), b.operators()[0].clone()],
    )
    .unwrap();
    let split = trotterized_channel(&[a, b], 0.5, 4, Splitting::FirstOrder).unwrap();
    assert!(split.distance(&ChannelMatrix::exact(&both, 2.0).unwrap()).unwrap() < 1e-10);
}

#[test]
fn first_order_split_converges_linearly() {
    let model = qubit_model();
    let (h, d) = model.split();
    let total = 1.0;
    let exact = ChannelMatrix::exact(&model, total).unwrap();
    let rho0 = DensityMatrix::from_pure(&StateVector::zero(1));
    let rho_exact = exact.apply(&rho0).unwrap();
    let mut dts = Vec::new();
    let mut errs = Vec::new();
    let mut state_errs = Vec::new();
    for steps in [8usize, 16, 32, 64, 128] {
        let k = trotterized_channel(&[h.clone(), d.clone()], total / steps as f64, steps, Splitting::FirstOrder).unwrap();
        assert!(k.trace_defect() < 1e-12);
        assert!(k.choi_min_eigenvalue() >= -1e-8);
        dts.push(total / steps as f64);
        errs.push(k.distance(&exact).unwrap());
        state_errs.push(trace_distance(&k.apply(&rho0).unwrap(), &rho_exact).unwrap());
    }
    for e in [&errs, &state_errs] {
        assert!(e.windows(2).all(|w| w[1] < w[0] * 1.05), "{e:?}");
        let slope = qsim_core::trotter::log_log_slope(&dts, e);
        assert!((0.8..=1.2).contains(&slope), "slope {slope}");
    }
}

#[test]
fn factors_are_channels() {
    let (h, d) = qubit_model().split();
    for m in [&h, &d] {
        let k = ChannelMatrix::exact(m, 0.3).unwrap();
        assert!(k.is_valid_channel());
    }
    let two = LindbladModel::diagonal(
        HermitianOperator::pauli_z().kron(&HermitianOperator::pauli_x()),
        &[0.5],
        vec![dense::kron(&sigma_minus(), &dense::pauli_z())],
    )
    .unwrap();
    let (h2, d2) = two.split();
    let k = trotterized_channel(&[h2, d2], 0.1, 10, Splitting::FirstOrder).unwrap();
    assert!(k.trace_defect() < 1e-10);
    assert!(k.choi_min_eigenvalue() >= -1e-8);
}

#[test]
fn amplitude_damping_reaches_ground() {
    let model = LindbladModel::diagonal(HermitianOperator::zeros(1), &[0.5], vec![sigma_minus()]).unwrap();
    let rho0 = DensityMatrix::from_pure(&StateVector::basis(1, 1).unwrap());
    let pts = trajectory(&model, &rho0, &[0.0, 1.0, 2.0, 40.0]).unwrap();
    // excited population decays at rate 2 × rate = 1
    assert!((pts[1].populations[1] - (-1.0f64).exp()).abs() < 1e-12);
    assert!((pts[2].populations[1] - (-2.0f64).exp()).abs() < 1e-12);
    assert!(pts[3].populations[0] > 1.0 - 1e-12);
    assert!(pts.iter().all(|p| (p.trace - 1.0).abs() < 1e-12));
}
