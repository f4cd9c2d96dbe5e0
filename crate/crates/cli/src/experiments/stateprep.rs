use qsim_core::stateprep::{amplitude_encode, block_probabilities, AmplitudeProfile};

use super::spec;
use crate::config::{finite, positive, Kind, ParamSpec, Params, Value};
use crate::error::CliError;
use crate::report::{num, Report, Table};

const COMPONENT_TOL: f64 = 1e-10;

pub fn specs() -> Vec<ParamSpec> {
    vec![
        spec("qubits", Kind::Int, || Value::Int(8), register_size, "register size n; the grid has 2^n points"),
        spec("center", Kind::Float, || Value::Float(0.5), finite, "Gaussian mean as a fraction of the grid"),
        spec("width", Kind::Float, || Value::Float(0.125), positive, "Gaussian standard deviation as a fraction of the grid"),
        spec("wavenumber", Kind::Float, || Value::Float(3.0), finite, "cosine modulation of the signed profile, in cycles across the grid"),
    ]
}

fn register_size(v: &Value) -> Result<(), String> {
    match v {
        Value::Int(n) if (1..=16).contains(n) => Ok(()),
        _ => Err("must be between 1 and 16".into()),
    }
}

pub fn run(p: &Params) -> Result<Report, CliError> {
    let n = p.usize("qubits");
    let len = 1usize << n;
    let (mu, sigma) = (p.f64("center") * len as f64, p.f64("width") * len as f64);
    let k = p.f64("wavenumber");
    let gauss = |x: usize| (-((x as f64 - mu).powi(2)) / (2.0 * sigma * sigma)).exp();
    let signed = |x: usize| gauss(x) * (2.0 * std::f64::consts::PI * k * x as f64 / len as f64).cos();

    let mut report = Report::default();
    let mut table = Table::new("stateprep.csv", &["profile", "x", "target", "prepared_re", "prepared_im", "error"]);
    let mut summary = Table::new("stateprep_summary.csv", &["profile", "qubits", "rotations", "rotation_budget", "max_error"]);
    let budget = len - 1;
    let profiles: [(&str, &dyn Fn(usize) -> f64); 2] = [("gaussian", &gauss), ("signed", &signed)];
    for (name, f) in profiles {
        let raw: Vec<f64> = (0..len).map(f).collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        let enc = amplitude_encode(&AmplitudeProfile::new(raw.clone())?)?;
        let mut worst: f64 = 0.0;
        for (x, (a, v)) in enc.state.amplitudes().iter().zip(&raw).enumerate() {
            let target = v / norm;
            let err = (a - target).norm();
            worst = worst.max(err);
            table.push(vec![name.into(), x.to_string(), num(target), num(a.re), num(a.im), num(err)]);
        }
        let coarse = block_probabilities(&enc.state, 1);
        report.metric(&format!("{name}_max_error"), worst);
        report.metric(&format!("{name}_rotations"), enc.controlled_rotations);
        report.metric(&format!("{name}_upper_half_weight"), coarse[1]);
        report.check(&format!("{name} amplitudes within {COMPONENT_TOL:e}"), worst <= COMPONENT_TOL, format!("{worst}"));
        report.check(
            &format!("{name} uses at most 2^n - 1 rotations"),
            enc.controlled_rotations <= budget,
            format!("{} of {budget}", enc.controlled_rotations),
        );
        summary.push(vec![name.into(), n.to_string(), enc.controlled_rotations.to_string(), budget.to_string(), num(worst)]);
    }
    report.tables = vec![summary, table];
    Ok(report)
}
