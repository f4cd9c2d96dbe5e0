use std::f64::consts::PI;

use qsim_core::dense::{self, Matrix, C64};
use qsim_core::firstq::{coherent_state, trajectory, Grid1D, ParticleSystem, PotentialMode, PotentialSpec, SplitOperator};
use qsim_core::{fidelity, StateVector};

use super::spec;
use crate::config::{finite, positive, Kind, ParamSpec, Params, Value};
use crate::error::CliError;
use crate::report::{num, Report, Table};

pub fn specs() -> Vec<ParamSpec> {
    vec![
        spec("grid_qubits", Kind::Int, || Value::Int(6), positive, "log2 of the number of grid points"),
        spec("x_min", Kind::Float, || Value::Float(-10.0), finite, "left edge of the periodic box"),
        spec("x_max", Kind::Float, || Value::Float(10.0), finite, "right edge of the periodic box"),
        spec("mass", Kind::Float, || Value::Float(1.0), positive, "particle mass"),
        spec("omega", Kind::Float, || Value::Float(1.0), positive, "oscillator frequency"),
        spec("x0", Kind::Float, || Value::Float(2.0), finite, "initial displacement of the coherent state"),
        spec("periods", Kind::Float, || Value::Float(1.0), positive, "evolution time in oscillator periods"),
        spec("slices", Kind::Int, || Value::Int(256), positive, "split-operator steps"),
        spec("order", Kind::Int, || Value::Int(2), split_order, "split-operator order (1 or 2)"),
        spec("potential_bits", Kind::Int, || Value::Int(16), positive, "ancilla bits for the circuit potential"),
        spec("stride", Kind::Int, || Value::Int(8), positive, "record every this many steps"),
    ]
}

fn split_order(v: &Value) -> Result<(), String> {
    match v {
        Value::Int(1 | 2) => Ok(()),
        _ => Err("must be 1 or 2".into()),
    }
}

/// Exact grid evolution: `H = F† diag(p²/2M) F + diag(V)` diagonalized once.
struct GridOracle {
    values: Vec<f64>,
    vectors: Matrix,
}

impl GridOracle {
    fn new(grid: &Grid1D, mass: f64, v: &[f64]) -> Self {
        let n = grid.points();
        let s = 1.0 / (n as f64).sqrt();
        let f = Matrix::from_fn(n, n, |k, x| C64::from_polar(s, -2.0 * PI * ((k * x) % n) as f64 / n as f64));
        let kin = Matrix::from_diagonal(&nalgebra::DVector::from_fn(n, |k, _| C64::new(grid.momentum(k).powi(2) / (2.0 * mass), 0.0)));
        let pot = Matrix::from_diagonal(&nalgebra::DVector::from_fn(n, |x, _| C64::new(v[x], 0.0)));
        let h = f.adjoint() * kin * &f + pot;
        let (values, vectors) = dense::eigh(&dense::hermitian_part(&h));
        Self { values, vectors }
    }

    fn mean_x(&self, grid: &Grid1D, psi0: &StateVector, t: f64) -> f64 {
        let c = self.vectors.adjoint() * dense::column_vector(psi0.amplitudes());
        let phased = nalgebra::DVector::from_fn(c.len(), |i, _| c[i] * C64::from_polar(1.0, -self.values[i] * t));
        let psi = &self.vectors * phased;
        psi.iter().enumerate().map(|(x, a)| a.norm_sqr() * grid.position(x)).sum()
    }
}

pub fn run(p: &Params) -> Result<Report, CliError> {
    let grid = Grid1D::new(p.usize("grid_qubits"), p.f64("x_min"), p.f64("x_max"))?;
    let (mass, omega) = (p.f64("mass"), p.f64("omega"));
    let system = ParticleSystem::single(mass, grid)?;
    let potential = PotentialSpec::harmonic(&system, omega, p.usize("potential_bits"))?;
    let t = p.f64("periods") * 2.0 * PI / omega;
    let slices = p.usize("slices");
    let order = p.usize("order") as u32;
    let psi0 = coherent_state(&grid, mass, omega, p.f64("x0"))?;

    let mut state = psi0.clone();
    let rows = trajectory(&mut state, &system, &potential, t, slices, order, p.usize("stride"))?;
    let oracle = GridOracle::new(&grid, mass, &potential.table(&system)?);
    let mut table = Table::new("wavepacket.csv", &["step", "time", "mean_x", "mean_p", "oracle_x", "norm", "energy"]);
    let mut max_dx: f64 = 0.0;
    let mut max_x: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for r in &rows {
        let ox = oracle.mean_x(&grid, &psi0, r.time);
        max_dx = max_dx.max((r.moments[0].mean_x - ox).abs());
        max_x = max_x.max(ox.abs());
        drift = drift.max((r.norm - 1.0).abs());
        table.push(vec![
            r.step.to_string(), num(r.time), num(r.moments[0].mean_x), num(r.moments[0].mean_p), num(ox), num(r.norm), num(r.energy),
        ]);
    }
    let rel = max_dx / max_x.max(f64::MIN_POSITIVE);

    let dt = t / slices as f64;
    let mut direct = psi0.clone();
    let mut kick = psi0.clone();
    let mut a = SplitOperator::new(&system, &potential, dt, order)?;
    let mut b = SplitOperator::with_mode(&system, &potential, dt, order, PotentialMode::Kickback)?;
    for _ in 0..slices {
        a.step(&mut direct)?;
        b.step(&mut kick)?;
    }
    let kick_fid = fidelity(&direct, &kick)?;

    let mut report = Report::default();
    report.metric("relative_x_error", rel);
    report.metric("norm_drift", drift);
    report.metric("kickback_fidelity", kick_fid);
    report.check("<x>(t) within 1e-3 relative of the grid oracle", rel <= 1e-3, format!("{rel}"));
    report.check("norm drift below 1e-10", drift < 1e-10, format!("{drift}"));
    report.check("kickback and direct potentials agree", kick_fid >= 1.0 - 1e-6, format!("{kick_fid}"));
    report.tables = vec![table];
    Ok(report)
}
