use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qsim_core::random::{random_hermitian, random_state, stream_rng};
use qsim_core::spectral::{phase_estimation_state, qft, DenseUnitary, RepeatedApplication};
use qsim_core::trotter::{build_plan, execute_plan, random_two_local};
use qsim_core::{standard_gate, StandardGate};

fn gate_kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("gate_kernel");
    let h = standard_gate(StandardGate::H).unwrap();
    for n in [12usize, 16, 20] {
        let mut s = random_state(n, &mut stream_rng(1, 0));
        g.bench_with_input(BenchmarkId::new("hadamard_sweep", n), &n, |b, &n| {
            b.iter(|| {
                for q in 0..n {
                    s.apply(&h, &[q], &[]).unwrap();
                }
            })
        });
        let mut s = random_state(n, &mut stream_rng(1, 1));
        g.bench_with_input(BenchmarkId::new("controlled_hadamard", n), &n, |b, &n| {
            b.iter(|| s.apply(&h, &[0], &[n - 1]).unwrap())
        });
    }
    g.finish();
}

fn fourier(c: &mut Criterion) {
    let mut g = c.benchmark_group("qft");
    for n in [8usize, 12, 16] {
        let qubits: Vec<usize> = (0..n).collect();
        let mut s = random_state(n, &mut stream_rng(2, 0));
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| qft(&mut s, &qubits).unwrap()));
    }
    g.finish();
}

fn trotter(c: &mut Criterion) {
    let mut g = c.benchmark_group("trotter_execute");
    let n = 8;
    let terms = random_two_local(n, &mut stream_rng(3, 0));
    for order in [2u32, 4] {
        let plan = build_plan(&terms, 1.0, order, 16).unwrap();
        g.bench_with_input(BenchmarkId::new("order", order), &plan, |b, plan| {
            b.iter_batched(
                || random_state(n, &mut stream_rng(3, 1)),
                |mut s| {
                    execute_plan(&mut s, plan, &terms).unwrap();
                    s
                },
                criterion::BatchSize::SmallInput,
            )
        });
    }
    g.finish();
}

/// Controlled powers from precomputed squarings versus applying `W` `2^j` times.
fn pea_powers(c: &mut Criterion) {
    let mut g = c.benchmark_group("pea_powers");
    let reg = 3;
    let w = random_hermitian(reg, 1.0, &mut stream_rng(4, 0)).evolution(1.0).unwrap();
    let register = random_state(reg, &mut stream_rng(4, 1));
    for m in [4usize, 6, 8] {
        g.bench_with_input(BenchmarkId::new("squaring", m), &m, |b, &m| {
            b.iter(|| {
                let oracle = DenseUnitary::new(w.matrix().clone(), m as u32).unwrap();
                black_box(phase_estimation_state(&oracle, &register, m).unwrap())
            })
        });
        let once = RepeatedApplication::new(reg, |s: &mut qsim_core::StateVector, ctrl: usize, r: &[usize]| s.apply_matrix(w.matrix(), r, &[ctrl]));
        g.bench_with_input(BenchmarkId::new("repeated", m), &m, |b, &m| {
            b.iter(|| black_box(phase_estimation_state(&once, &register, m).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, gate_kernel, fourier, trotter, pea_powers);
criterion_main!(benches);
