use std::f64::consts::{FRAC_PI_4, SQRT_2};

use qsim_core::adiabatic::{final_fidelity, nondestructive_measure, path_length, spectral_trace, time_bounds, Interpolation};
use qsim_core::models::transverse_ising;
use qsim_core::random::{stream_rng, uniform};
use qsim_core::HermitianOperator;

use super::spec;
use crate::config::{finite, positive, Kind, ParamSpec, Params, Value};
use crate::error::CliError;
use crate::report::{num, Report, Table};

const GAP_TOL: f64 = 1e-6;
const LENGTH_TOL: f64 = 1e-4;
const RIPPLE: f64 = 1e-3;
const A0_TOL: f64 = 1e-6;
const PROBE_FIDELITY: f64 = 1.0 - 1e-10;

pub fn sweep_specs() -> Vec<ParamSpec> {
    vec![
        spec("gap_points", Kind::Int, || Value::Int(33), positive, "initial s grid for the gap scan"),
        spec("path_tol", Kind::Float, || Value::Float(1e-9), positive, "convergence tolerance for the path length"),
        spec("times", Kind::Int, || Value::Int(10), positive, "number of sweep durations on the log grid"),
        spec("span", Kind::Float, || Value::Float(10.0), positive, "grid covers [t/span, t*span] around the path time bound"),
        spec("steps", Kind::Int, || Value::Int(2000), positive, "midpoint steps per sweep"),
    ]
}

pub fn probe_specs() -> Vec<ParamSpec> {
    vec![
        spec("coupling", Kind::Float, || Value::Float(1.0), finite, "Ising coupling J"),
        spec("field", Kind::Float, || Value::Float(0.7), finite, "transverse field h"),
        spec("delta", Kind::Float, || Value::Float(3.0), finite, "probe offset δ added to the readout frequency"),
        spec("t_max", Kind::Float, || Value::Float(4.0), positive, "last probe time"),
        spec("samples", Kind::Int, || Value::Int(41), positive, "probe times, evenly spaced from 0"),
    ]
}

pub fn run_sweep(p: &Params) -> Result<Report, CliError> {
    let interp = Interpolation::linear(HermitianOperator::pauli_x().scaled(-1.0), HermitianOperator::pauli_z().scaled(-1.0))?;
    let trace = spectral_trace(&interp, p.usize("gap_points"))?;
    let length = path_length(&interp, 16, p.f64("path_tol"))?;
    let bounds = time_bounds(&trace, &interp, length)?;
    let n = p.usize("times").max(2);
    let span = p.f64("span");
    let steps = p.usize("steps");

    let mut gap = Table::new("adiabatic_gap.csv", &["s", "e0", "e1", "gap"]);
    for i in 0..trace.s.len() {
        gap.push(vec![num(trace.s[i]), num(trace.e0[i]), num(trace.e1[i]), num(trace.gap[i])]);
    }
    let (lo, hi) = ((bounds.t_path1 / span).ln(), (bounds.t_path1 * span).ln());
    let mut sweep = Table::new("adiabatic_sweep.csv", &["total_time", "fidelity", "t_gap2", "t_path2", "t_path1"]);
    let mut fids = Vec::with_capacity(n);
    for i in 0..n {
        let t = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
        let f = final_fidelity(&interp, t, steps)?;
        fids.push(f);
        sweep.push(vec![num(t), num(f), num(bounds.t_gap2), num(bounds.t_path2), num(bounds.t_path1)]);
    }
    let monotone = fids.windows(2).all(|w| w[1] >= w[0] - RIPPLE);
    let gap_err = (trace.delta_min - SQRT_2).abs();
    let len_err = (length - FRAC_PI_4).abs();

    let mut report = Report::default();
    report.metric("delta_min", trace.delta_min);
    report.metric("s_min", trace.s_min);
    report.metric("path_length", length);
    report.metric("t_gap2", bounds.t_gap2);
    report.metric("t_path2", bounds.t_path2);
    report.metric("t_path1", bounds.t_path1);
    report.metric("final_fidelity_max", fids.iter().cloned().fold(0.0, f64::max));
    report.check("minimum gap equals sqrt(2)", gap_err <= GAP_TOL, format!("{}", trace.delta_min));
    report.check("path length equals pi/4", len_err <= LENGTH_TOL, format!("{length}"));
    report.check("fidelity nondecreasing in sweep time", monotone, format!("{fids:?}"));
    report.tables = vec![sweep, gap];
    Ok(report)
}

pub fn run_probe(p: &Params, seed: u64) -> Result<Report, CliError> {
    let h_f = transverse_ising(2, p.f64("coupling"), p.f64("field"))?;
    let (e0, ground) = h_f.ground_state();
    let n = p.usize("samples").max(3);
    let times: Vec<f64> = (0..n).map(|i| p.f64("t_max") * i as f64 / (n - 1) as f64).collect();
    let delta = p.f64("delta");

    let mut table = Table::new("probe_measure.csv", &["observable", "time", "p0"]);
    let mut summary = Table::new("probe_summary.csv", &["observable", "a0", "expected", "error", "omega", "min_fidelity", "fit_residual"]);
    let mut report = Report::default();
    let cases = [("identity", HermitianOperator::identity(2), 1.0), ("hamiltonian", h_f.clone(), e0)];
    for (k, (name, a, expected)) in cases.into_iter().enumerate() {
        let mut rng = stream_rng(seed, k as u64);
        let res = nondestructive_measure(&ground, &h_f, &a, delta, &times, &mut || uniform(&mut rng))?;
        for (t, p0) in res.times.iter().zip(&res.p0) {
            table.push(vec![name.into(), num(*t), num(*p0)]);
        }
        let err = (res.a0 - expected).abs();
        summary.push(vec![name.into(), num(res.a0), num(expected), num(err), num(res.omega), num(res.min_fidelity), num(res.max_residual)]);
        report.metric(&format!("{name}_a0"), res.a0);
        report.metric(&format!("{name}_min_fidelity"), res.min_fidelity);
        report.check(&format!("{name}: eigenvalue recovered"), err <= A0_TOL, format!("{} vs {expected}", res.a0));
        report.check(&format!("{name}: system undisturbed"), res.min_fidelity >= PROBE_FIDELITY, format!("{}", res.min_fidelity));
    }
    report.tables = vec![summary, table];
    Ok(report)
}
