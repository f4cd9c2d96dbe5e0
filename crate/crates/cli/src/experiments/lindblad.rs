use std::f64::consts::FRAC_1_SQRT_2;

use qsim_core::dense::{self, Matrix, C64};
use qsim_core::openquantum::{trajectory, trotterized_channel, ChannelMatrix, LindbladModel, Splitting};
use qsim_core::{trace_distance, DensityMatrix, HermitianOperator, StateVector};

use super::{decreasing_within, slope, spec};
use crate::config::{finite, non_empty_positive, non_negative, positive, Kind, ParamSpec, Params, Value};
use crate::error::CliError;
use crate::report::{num, Report, Table};

const SLOPE_WINDOW: (f64, f64) = (0.8, 1.2);
const RIPPLE: f64 = 0.05;
const TRACE_TOL: f64 = 1e-12;
const CHOI_TOL: f64 = -1e-8;

pub fn specs() -> Vec<ParamSpec> {
    vec![
        spec("drive", Kind::Float, || Value::Float(0.7), finite, "X coefficient of the Hamiltonian"),
        spec("detuning", Kind::Float, || Value::Float(0.4), finite, "Z coefficient of the Hamiltonian"),
        spec("damping", Kind::Float, || Value::Float(0.3), non_negative, "rate on the lowering operator"),
        spec("dephasing", Kind::Float, || Value::Float(0.2), non_negative, "rate on Z/sqrt(2)"),
        spec("cross_re", Kind::Float, || Value::Float(0.05), finite, "real part of the off-diagonal rate"),
        spec("cross_im", Kind::Float, || Value::Float(0.02), finite, "imaginary part of the off-diagonal rate"),
        spec("time", Kind::Float, || Value::Float(1.0), positive, "total evolution time"),
        spec("steps", Kind::IntList, || Value::IntList(vec![8, 16, 32, 64, 128]), non_empty_positive, "splitting step counts"),
        spec("samples", Kind::Int, || Value::Int(21), positive, "trajectory sample times"),
    ]
}

fn model(p: &Params) -> Result<LindbladModel, CliError> {
    let h = HermitianOperator::pauli_x().scaled(p.f64("drive")).plus(&HermitianOperator::pauli_z().scaled(p.f64("detuning")))?;
    let c = C64::new(p.f64("cross_re"), p.f64("cross_im"));
    let rates = Matrix::from_row_slice(2, 2, &[C64::new(p.f64("damping"), 0.0), c, c.conj(), C64::new(p.f64("dephasing"), 0.0)]);
    let lower = Matrix::from_row_slice(2, 2, &[dense::ZERO, dense::ONE, dense::ZERO, dense::ZERO]);
    let z = dense::pauli_z() * C64::new(FRAC_1_SQRT_2, 0.0);
    Ok(LindbladModel::new(h, rates, vec![lower, z])?)
}

pub fn run(p: &Params) -> Result<Report, CliError> {
    let model = model(p)?;
    let (ham, diss) = model.split();
    let total = p.f64("time");
    let exact = ChannelMatrix::exact(&model, total)?;
    let rho0 = DensityMatrix::from_pure(&StateVector::zero(1));
    let rho_exact = exact.apply(&rho0)?;

    let mut table = Table::new(
        "lindblad_convergence.csv",
        &["splitting", "steps", "dt", "channel_distance", "state_distance", "trace_defect", "choi_min_eigenvalue"],
    );
    let mut dts = Vec::new();
    let (mut first, mut first_state, mut strang) = (Vec::new(), Vec::new(), Vec::new());
    let mut worst_trace: f64 = 0.0;
    let mut worst_choi = f64::INFINITY;
    let parts = [ham, diss];
    for &n in &p.usize_list("steps") {
        let dt = total / n as f64;
        dts.push(dt);
        for (name, kind) in [("first_order", Splitting::FirstOrder), ("strang", Splitting::Strang)] {
            let k = trotterized_channel(&parts, dt, n, kind)?;
            let d = k.distance(&exact)?;
            let sd = trace_distance(&k.apply(&rho0)?, &rho_exact)?;
            worst_trace = worst_trace.max(k.trace_defect());
            worst_choi = worst_choi.min(k.choi_min_eigenvalue());
            match kind {
                Splitting::FirstOrder => {
                    first.push(d);
                    first_state.push(sd);
                }
                Splitting::Strang => strang.push(d),
            }
            table.push(vec![name.into(), n.to_string(), num(dt), num(d), num(sd), num(k.trace_defect()), num(k.choi_min_eigenvalue())]);
        }
    }
    let s_channel = slope(&dts, &first);
    let s_state = slope(&dts, &first_state);
    let s_strang = slope(&dts, &strang);
    let in_window = |s: f64| (SLOPE_WINDOW.0..=SLOPE_WINDOW.1).contains(&s);

    let samples = p.usize("samples").max(2);
    let times: Vec<f64> = (0..samples).map(|i| total * i as f64 / (samples - 1) as f64).collect();
    let mut traj = Table::new("lindblad_trajectory.csv", &["time", "p0", "p1", "coherence", "trace"]);
    for pt in trajectory(&model, &rho0, &times)? {
        traj.push(vec![num(pt.time), num(pt.populations[0]), num(pt.populations[1]), num(pt.coherence), num(pt.trace)]);
    }

    let mut report = Report::default();
    report.metric("slope_channel", s_channel);
    report.metric("slope_state", s_state);
    report.metric("slope_strang", s_strang);
    report.metric("max_trace_defect", worst_trace);
    report.metric("min_choi_eigenvalue", worst_choi);
    report.check("first-order channel error slope", in_window(s_channel), format!("{s_channel}"));
    report.check("first-order state error slope", in_window(s_state), format!("{s_state}"));
    report.check(
        "errors shrink with the step",
        decreasing_within(&first, RIPPLE) && decreasing_within(&first_state, RIPPLE),
        format!("{first:?}"),
    );
    report.check("trace preserved", worst_trace <= TRACE_TOL, format!("{worst_trace}"));
    report.check("Choi matrices positive", worst_choi >= CHOI_TOL, format!("{worst_choi}"));
    report.tables = vec![table, traj];
    Ok(report)
}
