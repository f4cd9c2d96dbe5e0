//! Randomized invariants over the state kernels and plan builders.

use proptest::prelude::*;
use qsim_core::random::{random_state, stream_rng};
use qsim_core::spectral::qft;
use qsim_core::stateprep::{amplitude_encode, AmplitudeProfile};
use qsim_core::trotter::{exponential_count, TrotterPlan};
use qsim_core::{trace_distance, DensityMatrix, Matrix, StateVector, C64};

/// Random 2×2 unitary from three Euler angles and a global phase.
fn unitary(a: f64, b: f64, c: f64, d: f64) -> Matrix {
    let (cs, sn) = ((a / 2.0).cos(), (a / 2.0).sin());
    let g = C64::from_polar(1.0, d);
    Matrix::from_row_slice(
        2,
        2,
        &[
            g * C64::from_polar(cs, -(b + c) / 2.0),
            -g * C64::from_polar(sn, (c - b) / 2.0),
            g * C64::from_polar(sn, (b - c) / 2.0),
            g * C64::from_polar(cs, (b + c) / 2.0),
        ],
    )
}

/// Full-register matrix of `u` on `target` conditioned on every control being 1.
fn controlled_dense(u: &Matrix, target: usize, controls: &[usize], n: usize) -> Matrix {
    let dim = 1 << n;
    let cmask: usize = controls.iter().map(|c| 1 << c).sum();
    Matrix::from_fn(dim, dim, |r, c| {
        let active = c & cmask == cmask;
        if !active {
            return if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        }
        if r & !(1 << target) != c & !(1 << target) {
            return C64::new(0.0, 0.0);
        }
        u[((r >> target) & 1, (c >> target) & 1)]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn controlled_gate_matches_dense_matrix(
        n in 2usize..=5,
        angles in prop::array::uniform4(-3.2f64..3.2),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 3),
        n_controls in 0usize..=2,
        seed in any::<u64>(),
    ) {
        let mut qubits: Vec<usize> = (0..n).collect();
        let mut chosen = Vec::new();
        for p in picks.iter().take((n_controls + 1).min(n)) {
            chosen.push(qubits.remove(p.index(qubits.len())));
        }
        let (target, controls) = (chosen[0], &chosen[1..]);
        let u = unitary(angles[0], angles[1], angles[2], angles[3]);
        let start = random_state(n, &mut stream_rng(seed, 0));
        let mut s = start.clone();
        s.apply_matrix(&u, &[target], controls).unwrap();
        let expected = controlled_dense(&u, target, controls, n) * nalgebra::DVector::from_column_slice(start.amplitudes());
        for (a, b) in s.amplitudes().iter().zip(expected.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn qft_is_norm_preserving_and_spreads_basis_states(n in 1usize..=6, x in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let qubits: Vec<usize> = (0..n).collect();
        let mut s = random_state(n, &mut stream_rng(seed, 1));
        qft(&mut s, &qubits).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        let mut b = StateVector::basis(n, x.index(1 << n)).unwrap();
        qft(&mut b, &qubits).unwrap();
        let flat = 1.0 / (1u64 << n) as f64;
        prop_assert!(b.probabilities().iter().all(|p| (p - flat).abs() < 1e-12));
    }

    #[test]
    fn amplitude_encoding_reproduces_signed_profiles(values in (1usize..=5).prop_flat_map(|n| prop::collection::vec(-2.0f64..2.0, 1 << n))) {
        prop_assume!(values.iter().any(|v| v.abs() > 1e-3));
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let enc = amplitude_encode(&AmplitudeProfile::new(values.clone()).unwrap()).unwrap();
        prop_assert!(enc.controlled_rotations < values.len());
        for (a, v) in enc.state.amplitudes().iter().zip(&values) {
            prop_assert!((a - C64::new(v / norm, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn measurement_branches_partition_probability(n in 1usize..=5, q in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let s = random_state(n, &mut stream_rng(seed, 2));
        let qubit = q.index(n);
        let (_, p0) = s.project_out(&[qubit], 0).unwrap();
        let (_, p1) = s.project_out(&[qubit], 1).unwrap();
        prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
        prop_assert!((p1 - s.prob_one(qubit).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn trotter_plans_spend_the_full_time_on_every_term(m in 1usize..=6, k in 1u32..=3, slices in 1usize..=8, t in 0.1f64..5.0) {
        let plan = TrotterPlan::new(m, t, 2 * k, slices).unwrap();
        for d in plan.durations_per_term() {
            prop_assert!((d - t).abs() < 1e-10 * t.max(1.0));
        }
        prop_assert_eq!(plan.exponential_count(), slices * (exponential_count(m, k) - 1) + 1);
    }

    #[test]
    fn trace_distance_is_a_bounded_symmetric_metric(n in 1usize..=3, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 3);
        let (a, b) = (random_state(n, &mut rng), random_state(n, &mut rng));
        let (ra, rb) = (DensityMatrix::from_pure(&a), DensityMatrix::from_pure(&b));
        let d = trace_distance(&ra, &rb).unwrap();
        prop_assert!((d - trace_distance(&rb, &ra).unwrap()).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&d));
        // pure states: D = √(1 − F)
        let f = a.inner(&b).unwrap().norm_sqr();
        prop_assert!((d - (1.0 - f).max(0.0).sqrt()).abs() < 1e-9);
    }
}
