use std::f64::consts::PI;

use qsim_core::dense::{self, Matrix, C64};
use qsim_core::random::{random_hermitian, random_state, stream_rng, uniform};
use qsim_core::spectral::{ancilla_budget, phase_distribution, phase_estimation, qft_circuit, DenseUnitary, EnergyWindow, GroundStateProjector};
use qsim_core::{fidelity, HermitianOperator, StateVector};

use super::spec;
use crate::config::{non_empty_positive, positive, probability, Kind, ParamSpec, Params, Value};
use crate::error::CliError;
use crate::report::{num, Report, Table};

pub fn pea_specs() -> Vec<ParamSpec> {
    vec![
        spec("bits", Kind::IntList, || Value::IntList(vec![3, 5]), non_empty_positive, "target precision p per case"),
        spec("epsilons", Kind::FloatList, || Value::FloatList(vec![0.125, 0.0625]), probability, "failure budget ε per case"),
        spec("phases", Kind::Int, || Value::Int(2000), positive, "random phases per case"),
        spec("projection_trials", Kind::Int, || Value::Int(2000), positive, "ground-state projection attempts"),
        spec("projection_overlap", Kind::Float, || Value::Float(0.7), probability, "ground-state weight of the projection trial"),
    ]
}

pub fn qft_specs() -> Vec<ParamSpec> {
    vec![spec("max_qubits", Kind::Int, || Value::Int(8), qft_size, "check register sizes 1..=max_qubits")]
}

fn qft_size(v: &Value) -> Result<(), String> {
    match v {
        Value::Int(n) if (1..=12).contains(n) => Ok(()),
        _ => Err("must be between 1 and 12".into()),
    }
}

/// `√F |g⟩ + √(1−F) |r⊥⟩` with `r⊥` a random state orthogonal to `g`.
fn trial_with_overlap(ground: &StateVector, f: f64, rng: &mut qsim_core::random::SimRng) -> Result<StateVector, CliError> {
    let r = random_state(ground.n_qubits(), rng);
    let c = ground.inner(&r)?;
    let perp: Vec<C64> = r.amplitudes().iter().zip(ground.amplitudes()).map(|(a, g)| a - g * c).collect();
    let perp = StateVector::from_unnormalized(perp)?;
    let (a, b) = (f.sqrt(), (1.0 - f).sqrt());
    Ok(StateVector::from_amplitudes(
        ground.amplitudes().iter().zip(perp.amplitudes()).map(|(g, q)| g * a + q * b).collect(),
    )?)
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn phase_oracle(phi: f64, m: usize) -> Result<DenseUnitary, CliError> {
    let w = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::from_polar(1.0, 2.0 * PI * phi)]));
    Ok(DenseUnitary::new(w, m as u32)?)
}

pub fn run_pea(p: &Params, seed: u64) -> Result<Report, CliError> {
    let bits = p.usize_list("bits");
    let eps = p.f64_list("epsilons");
    if bits.len() != eps.len() {
        return Err(CliError::Domain { key: "epsilons".into(), reason: format!("{} values for {} bit counts", eps.len(), bits.len()) });
    }
    let n_phases = p.usize("phases");
    let mut report = Report::default();
    let mut trials = Table::new("pea_precision.csv", &["case", "bits", "epsilon", "ancillas", "trial", "phase", "outcome", "estimate", "error", "success"]);
    let mut cases = Table::new("pea_cases.csv", &["case", "bits", "epsilon", "ancillas", "success_rate", "exact_min_probability"]);
    let one = StateVector::basis(1, 1)?;
    for (case, (&pb, &e)) in bits.iter().zip(&eps).enumerate() {
        let m = ancilla_budget(pb, e)?;
        let mut rng = stream_rng(seed, case as u64);
        let mut hits = 0usize;
        for trial in 0..n_phases {
            let phi = uniform(&mut rng);
            let out = phase_estimation(&phase_oracle(phi, m)?, &one, m, uniform(&mut rng))?;
            let err = circular_distance(out.estimate.phase, phi);
            let ok = err < 2f64.powi(-(pb as i32));
            hits += ok as usize;
            trials.push(vec![
                case.to_string(), pb.to_string(), num(e), m.to_string(), trial.to_string(), num(phi),
                out.estimate.register_outcome.to_string(), num(out.estimate.phase), num(err), ok.to_string(),
            ]);
        }
        let rate = hits as f64 / n_phases as f64;
        // every m-bit phase must be read out with certainty
        let mut exact_min: f64 = 1.0;
        for j in 0..1usize << m {
            let dist = phase_distribution(&phase_oracle(j as f64 / (1u64 << m) as f64, m)?, &one, m)?;
            exact_min = exact_min.min(dist[j]);
        }
        cases.push(vec![case.to_string(), pb.to_string(), num(e), m.to_string(), num(rate), num(exact_min)]);
        report.metric(&format!("case{case}_ancillas"), m);
        report.metric(&format!("case{case}_success_rate"), rate);
        report.metric(&format!("case{case}_exact_min_probability"), exact_min);
        report.check(&format!("p={pb}, eps={e}: success rate >= 1 - eps"), rate >= 1.0 - e, format!("{rate}"));
        report.check(&format!("p={pb}, eps={e}: exact phases certain"), exact_min >= 1.0 - 1e-10, format!("{exact_min}"));
    }

    // projection onto the ground state of a Hamiltonian with exactly representable phases
    let mut rng = stream_rng(seed, bits.len() as u64);
    let basis = random_hermitian(2, 1.0, &mut rng).evolution(1.0)?;
    let levels = Matrix::from_diagonal(&nalgebra::DVector::from_fn(4, |k, _| C64::new(k as f64, 0.0)));
    let h = HermitianOperator::new(basis.matrix() * levels * basis.matrix().adjoint())?;
    let ground = StateVector::from_unnormalized(basis.matrix().column(0).iter().copied().collect())?;
    let trial = trial_with_overlap(&ground, p.f64("projection_overlap"), &mut rng)?;
    let f = trial.inner(&ground)?.norm_sqr();
    let projector = GroundStateProjector::with_bounds(&h, 2, 0.0, 3.0)?;
    let window = EnergyWindow::new(-0.5, 0.5)?;
    let exact = projector.acceptance_probability(&trial, window)?;
    let n_proj = p.usize("projection_trials");
    let mut proj = Table::new("projection.csv", &["trial", "outcome", "energy", "accepted", "ground_fidelity"]);
    let mut accepted = 0usize;
    let mut worst_post: f64 = 1.0;
    for i in 0..n_proj {
        let r = projector.project(&trial, window, uniform(&mut rng))?;
        let gf = fidelity(&r.state, &ground)?;
        if r.accepted {
            accepted += 1;
            worst_post = worst_post.min(gf);
        }
        proj.push(vec![i.to_string(), r.estimate.register_outcome.to_string(), num(r.energy), r.accepted.to_string(), num(gf)]);
    }
    let freq = accepted as f64 / n_proj as f64;
    let sigma = (f * (1.0 - f) / n_proj as f64).sqrt();
    report.metric("projection_overlap", f);
    report.metric("projection_exact_acceptance", exact);
    report.metric("projection_frequency", freq);
    report.metric("projection_sigma", sigma);
    report.check("projection acceptance probability equals overlap", (exact - f).abs() < 1e-10, format!("{exact} vs {f}"));
    report.check("projection frequency within 3 sigma of overlap", (freq - f).abs() <= 3.0 * sigma, format!("{freq} vs {f} (σ {sigma})"));
    report.check("accepted states are the ground state", worst_post >= 1.0 - 1e-10, format!("{worst_post}"));
    report.tables = vec![trials, cases, proj];
    Ok(report)
}

pub fn run_qft(p: &Params) -> Result<Report, CliError> {
    let mut report = Report::default();
    let mut t = Table::new("qft_check.csv", &["qubits", "max_abs_error", "gate_count", "gate_bound"]);
    let mut worst: f64 = 0.0;
    let mut counts_ok = true;
    for n in 1..=p.usize("max_qubits") {
        let c = qft_circuit(n)?;
        let dim = 1usize << n;
        let s = 1.0 / (dim as f64).sqrt();
        let dft = Matrix::from_fn(dim, dim, |k, x| C64::from_polar(s, 2.0 * PI * ((x * k) % dim) as f64 / dim as f64));
        let err = dense::max_abs_diff(&c.matrix()?, &dft);
        let bound = n * (n + 1) / 2 + n;
        worst = worst.max(err);
        counts_ok &= c.gate_count() <= bound;
        t.push(vec![n.to_string(), num(err), c.gate_count().to_string(), bound.to_string()]);
    }
    report.metric("max_abs_error", worst);
    report.check("circuit equals the DFT matrix", worst <= 1e-10, format!("{worst}"));
    report.check("gate count within n(n+1)/2 + n", counts_ok, "");
    report.tables = vec![t];
    Ok(report)
}
