use qsim_core::random::{stream_rng, SimRng};
use qsim_core::thermal::{chain_update, exact_thermal, perturbative_update, randomized_bound_sweep, ChainMode, Dephasing};
use qsim_core::{trace_distance, HermitianOperator};

use super::spec;
use crate::config::{finite, non_empty_positive, non_negative, positive, probability, Kind, ParamSpec, Params, Value};
use crate::error::CliError;
use crate::report::{num, Report, Table};

const CHAIN_TOL: f64 = 0.01;

pub fn bound_specs() -> Vec<ParamSpec> {
    vec![
        spec("draws", Kind::Int, || Value::Int(100), positive, "random (H, h) pairs"),
        spec("max_qubits", Kind::Int, || Value::Int(3), thermal_size, "draw d uses 1 + d mod max_qubits qubits"),
        spec("betas", Kind::FloatList, || Value::FloatList(vec![0.1, 1.0, 10.0]), non_empty_positive, "inverse temperatures"),
        spec("epsilons", Kind::FloatList, || Value::FloatList(vec![0.01, 0.1]), probability, "perturbation strengths"),
    ]
}

fn thermal_size(v: &Value) -> Result<(), String> {
    match v {
        Value::Int(n) if (1..=6).contains(n) => Ok(()),
        _ => Err("must be between 1 and 6".into()),
    }
}

pub fn chain_specs() -> Vec<ParamSpec> {
    vec![
        spec("field1", Kind::Float, || Value::Float(1.0), finite, "first subsystem H1 = field1 Z"),
        spec("field2", Kind::Float, || Value::Float(0.7), finite, "second subsystem H2 = field2 Z"),
        spec("coupling", Kind::Float, || Value::Float(0.5), finite, "coupling strength of Z⊗Z"),
        spec("beta", Kind::Float, || Value::Float(1.0), positive, "inverse temperature"),
        spec("epsilon", Kind::Float, || Value::Float(0.01), probability, "step size of the chain"),
        spec("gap_epsilons", Kind::FloatList, || Value::FloatList(vec![0.04, 0.02, 0.01, 0.005]), probability, "step sizes for the success-gap scaling"),
        spec("max_restarts", Kind::Int, || Value::Int(1000), non_negative, "restart budget of the sampled chain"),
    ]
}

pub fn run_bound(p: &Params, seed: u64) -> Result<Report, CliError> {
    let records = randomized_bound_sweep(p.usize("draws"), p.usize("max_qubits"), &p.f64_list("betas"), &p.f64_list("epsilons"), seed)?;
    let mut table = Table::new("thermal_bound.csv", &["draw", "qubits", "beta", "epsilon", "lhs", "rhs", "margin", "dyson"]);
    let mut violations = 0usize;
    let mut dyson_violations = 0usize;
    let mut tightest = f64::INFINITY;
    for r in &records {
        let c = &r.check;
        if !c.holds() {
            violations += 1;
        }
        if c.dyson > c.rhs + qsim_core::thermal::BOUND_SLACK {
            dyson_violations += 1;
        }
        tightest = tightest.min(c.margin() / c.rhs);
        table.push(vec![
            r.draw.to_string(), r.n_qubits.to_string(), num(r.beta), num(r.epsilon), num(c.lhs), num(c.rhs), num(c.margin()), num(c.dyson),
        ]);
    }
    let mut report = Report::default();
    report.metric("cases", records.len());
    report.metric("violations", violations);
    report.metric("dyson_violations", dyson_violations);
    report.metric("tightest_relative_margin", tightest);
    report.check("trace-norm bound holds on every case", violations == 0, format!("{violations} of {}", records.len()));
    report.check("first-order term within the bound", dyson_violations == 0, format!("{dyson_violations} of {}", records.len()));
    report.tables = vec![table];
    Ok(report)
}

pub fn run_chain(p: &Params, seed: u64) -> Result<Report, CliError> {
    let z = HermitianOperator::pauli_z();
    let id = HermitianOperator::identity(1);
    let h1 = z.scaled(p.f64("field1"));
    let h2 = z.scaled(p.f64("field2"));
    let coupling = z.kron(&z).scaled(p.f64("coupling"));
    let beta = p.f64("beta");
    let eps = p.f64("epsilon");

    let det = chain_update::<SimRng>(&h1, &h2, &coupling, beta, eps, ChainMode::Deterministic)?;
    let total = id.kron(&h1).plus(&h2.kron(&id))?.plus(&coupling)?;
    let target = exact_thermal(&total, beta)?;
    let dist = trace_distance(&det.rho, &target.rho)?;

    let mut rng = stream_rng(seed, 0);
    let mc = chain_update(&h1, &h2, &coupling, beta, eps, ChainMode::MonteCarlo { rng: &mut rng, max_restarts: p.usize("max_restarts") })?;
    let mc_dist = trace_distance(&mc.rho, &target.rho)?;

    let mut steps = Table::new("thermal_chain.csv", &["step", "epsilon", "exact_success", "first_order_success", "gap"]);
    for l in &det.log {
        steps.push(vec![l.step.to_string(), num(l.epsilon), num(l.exact_success), num(l.first_order_success), num((l.exact_success - l.first_order_success).abs())]);
    }

    // first step from the uncoupled state at each step size
    let start = exact_thermal(&id.kron(&h1).plus(&h2.kron(&id))?, beta)?;
    let mut scaling = Table::new("thermal_gap_scaling.csv", &["epsilon", "gap", "gap_over_eps2"]);
    let mut ratios = Vec::new();
    for &e in &p.f64_list("gap_epsilons") {
        let out = perturbative_update(&start, &coupling, e, Dephasing::Exact)?;
        let gap = (out.exact_success - out.first_order_success).abs();
        ratios.push(gap / (e * e));
        scaling.push(vec![num(e), num(gap), num(gap / (e * e))]);
    }
    let stable = ratios.windows(2).all(|w| (0.5..=2.0).contains(&(w[1] / w[0])));

    let mut report = Report::default();
    report.metric("trace_distance", dist);
    report.metric("cumulative_success", det.cumulative_success);
    report.metric("steps", det.log.len());
    report.metric("sampled_trace_distance", mc_dist);
    report.metric("sampled_restarts", mc.restarts);
    report.metric("sampled_attempted_steps", mc.attempted_steps);
    report.check("chain reaches the composite Gibbs state", dist <= CHAIN_TOL, format!("{dist}"));
    report.check("sampled chain completed", mc.completed && mc_dist <= CHAIN_TOL, format!("{} restarts, distance {mc_dist}", mc.restarts));
    report.check("success gap scales as epsilon^2", stable, format!("{ratios:?}"));
    report.tables = vec![steps, scaling];
    Ok(report)
}
