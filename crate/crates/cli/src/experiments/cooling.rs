use qsim_core::cooling::{choose_params, energy_balance_check, run_ensemble, CoolingCircuit, SpectrumBounds};
use qsim_core::dense;
use qsim_core::models::transverse_ising;
use qsim_core::random::{random_state, stream_rng};
use qsim_core::StateVector;

use super::spec;
use crate::config::{finite, non_empty_positive, positive, Kind, ParamSpec, Params, Value};
use crate::error::CliError;
use crate::report::{num, Report, Table};

const BALANCE_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-8;
/// Input states draw from this stream so they never collide with walker streams.
const INPUT_STREAM: u64 = u64::MAX;

pub fn specs() -> Vec<ParamSpec> {
    vec![
        spec("coupling", Kind::Float, || Value::Float(1.0), finite, "Ising coupling J"),
        spec("field", Kind::Float, || Value::Float(0.7), finite, "transverse field h"),
        spec("bounds", Kind::Str, || Value::Str("gershgorin".into()), spectrum_bounds, "spectrum bracket for the phase window: gershgorin or dense"),
        spec("margin", Kind::Float, || Value::Float(0.1), window_margin, "distance of the spectrum from the window edges"),
        spec("inputs", Kind::Int, || Value::Int(100), positive, "random states for the single-round checks"),
        spec("walkers", Kind::Int, || Value::Int(200), positive, "walkers per ensemble"),
        spec("x_stops", Kind::IntList, || Value::IntList(vec![1, 2, 4, 8]), non_empty_positive, "stopping distances"),
        spec("max_restarts", Kind::Int, || Value::Int(10_000), positive, "restart budget per walker"),
    ]
}

fn window_margin(v: &Value) -> Result<(), String> {
    match v {
        Value::Float(m) if *m > 0.0 && *m < std::f64::consts::FRAC_PI_2 => Ok(()),
        _ => Err("must lie strictly between 0 and pi/2".into()),
    }
}

fn spectrum_bounds(v: &Value) -> Result<(), String> {
    match v {
        Value::Str(s) if s == "gershgorin" || s == "dense" => Ok(()),
        _ => Err("must be \"gershgorin\" or \"dense\"".into()),
    }
}

/// `‖Hψ − ⟨H⟩ψ‖`, zero exactly on eigenstates.
fn eigen_residual(h: &qsim_core::HermitianOperator, s: &StateVector) -> Result<f64, CliError> {
    let v = dense::column_vector(s.amplitudes());
    let e = s.expectation(h)?;
    Ok((h.matrix() * &v - &v * qsim_core::C64::new(e, 0.0)).norm())
}

pub fn run(p: &Params, seed: u64) -> Result<Report, CliError> {
    let h = transverse_ising(2, p.f64("coupling"), p.f64("field"))?;
    let bounds = if p.str("bounds") == "dense" { SpectrumBounds::Dense } else { SpectrumBounds::Gershgorin };
    let params = choose_params(&h, p.f64("margin"), bounds)?;
    let circuit = CoolingCircuit::new(&h, params)?;

    let mut rng = stream_rng(seed, INPUT_STREAM);
    let mut rounds = Table::new("cooling_rounds.csv", &["input", "e_in", "p0", "e0", "p1", "e1", "imbalance", "eigen_residual"]);
    let mut worst_balance: f64 = 0.0;
    let mut not_cooled = 0usize;
    let mut checked = 0usize;
    for i in 0..p.usize("inputs") {
        let s = random_state(2, &mut rng);
        let b = energy_balance_check(&circuit, &s)?;
        let r = eigen_residual(&h, &s)?;
        worst_balance = worst_balance.max(b.imbalance());
        if r > EIGEN_TOL {
            checked += 1;
            if b.e0.partial_cmp(&b.e_in) != Some(std::cmp::Ordering::Less) {
                not_cooled += 1;
            }
        }
        rounds.push(vec![i.to_string(), num(b.e_in), num(b.p0), num(b.e0), num(b.p1), num(b.e1), num(b.imbalance()), num(r)]);
    }

    let start = StateVector::uniform(2);
    let e_start = start.expectation(&h)?;
    let mut walkers = Table::new("cooling_walkers.csv", &["x_stop", "walker", "restarts", "steps", "final_energy", "ground_fidelity", "completed"]);
    let mut ensemble = Table::new("cooling_ensemble.csv", &["x_stop", "mean_energy", "mean_ground_fidelity", "completed_fraction"]);
    let mut means = Vec::new();
    let mut all_completed = true;
    for &x in &p.usize_list("x_stops") {
        let rows = run_ensemble(&circuit, &start, x as i64, p.usize("max_restarts"), p.usize("walkers"), seed)?;
        let n = rows.len() as f64;
        let mean = rows.iter().map(|r| r.final_energy).sum::<f64>() / n;
        let fid = rows.iter().map(|r| r.ground_fidelity).sum::<f64>() / n;
        let done = rows.iter().filter(|r| r.completed).count();
        all_completed &= done == rows.len();
        for r in &rows {
            walkers.push(vec![
                x.to_string(), r.walker.to_string(), r.restarts.to_string(), r.steps.to_string(), num(r.final_energy), num(r.ground_fidelity), r.completed.to_string(),
            ]);
        }
        ensemble.push(vec![x.to_string(), num(mean), num(fid), num(done as f64 / n)]);
        means.push(mean);
    }
    let decreasing = means.windows(2).all(|w| w[1] < w[0]) && means.first().is_some_and(|m| *m < e_start);

    let mut report = Report::default();
    report.metric("gamma", params.gamma);
    report.metric("t", params.t);
    report.metric("start_energy", e_start);
    report.metric("ground_energy", circuit.energies()[0]);
    report.metric("max_imbalance", worst_balance);
    report.metric("non_eigen_inputs", checked);
    report.metric("mean_energies", means.clone());
    report.check("energy balance on every input", worst_balance <= BALANCE_TOL, format!("{worst_balance}"));
    report.check("outcome 0 strictly cools every non-eigenstate", not_cooled == 0, format!("{not_cooled} of {checked}"));
    report.check("every walker reached its stop", all_completed, "");
    report.check("mean energy strictly decreasing in x_stop", decreasing, format!("start {e_start}, means {means:?}"));
    report.tables = vec![ensemble, rounds, walkers];
    Ok(report)
}
