use qsim_core::dense::{self, Matrix};
use qsim_core::random::stream_rng;
use qsim_core::secondq::{
    build_qubit_hamiltonian, estimate_ground_energy, fermionic_hamiltonian, hartree_fock_index, ladder, load_integrals,
    parse_integrals, reduce_to_two_body, GroundEnergyOptions, IntegralSet, PauliSum, H2_STO3G,
};
use qsim_core::{HermitianOperator, StateVector};

use super::spec;
use crate::config::{any, positive, probability, Kind, ParamSpec, Params, Value};
use crate::error::CliError;
use crate::report::{num, Report, Table};

const ALGEBRA_TOL: f64 = 1e-12;
const SECTOR_TOL: f64 = 1e-10;

pub fn specs() -> Vec<ParamSpec> {
    vec![
        spec("integrals", Kind::Str, || Value::Str(String::new()), any, "integral file path; empty selects the bundled H2 set"),
        spec("electrons", Kind::Int, || Value::Int(2), positive, "electron count"),
        spec("bits", Kind::Int, || Value::Int(10), positive, "phase-estimation precision p"),
        spec("epsilon", Kind::Float, || Value::Float(1.0 / 16.0), probability, "phase-estimation failure budget"),
        spec("order", Kind::Int, || Value::Int(2), positive, "product-formula order"),
        spec("slices", Kind::Int, || Value::Int(4), positive, "product-formula slices"),
        spec("max_trials", Kind::Int, || Value::Int(200), positive, "phase-estimation repetitions before giving up"),
        spec("algebra_modes", Kind::Int, || Value::Int(5), positive, "check ladder anticommutators up to this many modes"),
    ]
}

fn sum_dense(s: &PauliSum) -> Result<Matrix, CliError> {
    let mut m: Option<Matrix> = None;
    for p in s.strings() {
        let d = p.to_dense()?;
        m = Some(match m {
            Some(acc) => acc + d,
            None => d,
        });
    }
    Ok(m.expect("ladder images have two strings"))
}

/// Largest deviation of `{a_j, a_k†}` from `δ_jk` and of `{a_j, a_k}` from 0.
fn anticommutator_defect(n: usize) -> Result<f64, CliError> {
    let a: Vec<Matrix> = (0..n).map(|j| sum_dense(&ladder(j, false, n)?)).collect::<Result<_, _>>()?;
    let ad: Vec<Matrix> = (0..n).map(|j| sum_dense(&ladder(j, true, n)?)).collect::<Result<_, _>>()?;
    let dim = 1 << n;
    let id = dense::identity(dim);
    let zero = Matrix::zeros(dim, dim);
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let mixed = &a[j] * &ad[k] + &ad[k] * &a[j];
            let target = if j == k { &id } else { &zero };
            worst = worst.max(dense::max_abs_diff(&mixed, target));
            let same = &a[j] * &a[k] + &a[k] * &a[j];
            worst = worst.max(dense::max_abs_diff(&same, &zero));
            let same_d = &ad[j] * &ad[k] + &ad[k] * &ad[j];
            worst = worst.max(dense::max_abs_diff(&same_d, &zero));
        }
    }
    Ok(worst)
}

/// Spectrum of `h` restricted to basis states with `n` occupied modes.
fn sector_spectrum(h: &HermitianOperator, n: usize) -> Vec<f64> {
    let idx: Vec<usize> = (0..h.dim()).filter(|b| b.count_ones() as usize == n).collect();
    let sub = Matrix::from_fn(idx.len(), idx.len(), |r, c| h.matrix()[(idx[r], idx[c])]);
    dense::eigvalsh(&sub)
}

fn load(p: &Params) -> Result<IntegralSet, CliError> {
    Ok(match p.str("integrals") {
        "" => parse_integrals(H2_STO3G)?,
        path => load_integrals(path)?,
    })
}

pub fn run(p: &Params, seed: u64) -> Result<Report, CliError> {
    let ints = load(p)?;
    let n_el = p.usize("electrons");
    let k = ints.n_modes();
    if n_el > k {
        return Err(CliError::Domain { key: "electrons".into(), reason: format!("{n_el} electrons in {k} modes") });
    }
    let mut report = Report::default();

    let mut algebra = Table::new("jw_algebra.csv", &["modes", "max_defect"]);
    let mut worst_algebra: f64 = 0.0;
    for n in 1..=p.usize("algebra_modes") {
        let d = anticommutator_defect(n)?;
        worst_algebra = worst_algebra.max(d);
        algebra.push(vec![n.to_string(), num(d)]);
    }

    let ham = fermionic_hamiltonian(&ints)?;
    let dense_h = ham.to_dense()?;
    let mut sectors = Table::new("sector_spectra.csv", &["electrons", "level", "full", "reduced", "difference"]);
    let mut worst_sector: f64 = 0.0;
    for n in 2..=k {
        let reduced = build_qubit_hamiltonian(&reduce_to_two_body(&ints, n)?)?.to_dense()?;
        let (a, b) = (sector_spectrum(&dense_h, n), sector_spectrum(&reduced, n));
        for (i, (x, y)) in a.iter().zip(&b).enumerate() {
            worst_sector = worst_sector.max((x - y).abs());
            sectors.push(vec![n.to_string(), i.to_string(), num(*x), num(*y), num((x - y).abs())]);
        }
    }

    let sector = sector_spectrum(&dense_h, n_el);
    let exact = sector[0];
    let all = dense_h.eigenvalues();
    let range = all[all.len() - 1] - all[0];
    let opts = GroundEnergyOptions {
        p_bits: p.usize("bits"),
        epsilon: p.f64("epsilon"),
        order: p.usize("order") as u32,
        slices: p.usize("slices"),
        max_trials: p.usize("max_trials"),
        window: None,
        check_slicing: true,
    };
    let trial = StateVector::basis(k, hartree_fock_index(n_el))?;
    let est = estimate_ground_energy(&ham, &trial, &opts, &mut stream_rng(seed, 0))?;
    let tol = 2.0 * range / (1u64 << opts.p_bits) as f64;
    let err = (est.energy - exact).abs();

    let mut energy = Table::new("h2_energy.csv", &["pauli_terms", "ancillas", "trials", "accepted", "estimate", "exact", "error", "tolerance"]);
    energy.push(vec![
        ham.len().to_string(),
        est.ancillas.to_string(),
        est.trials.to_string(),
        est.accepted.to_string(),
        num(est.energy),
        num(exact),
        num(err),
        num(tol),
    ]);

    report.metric("energy", est.energy);
    report.metric("exact_energy", exact);
    report.metric("energy_error", err);
    report.metric("tolerance", tol);
    report.metric("pauli_terms", ham.len());
    report.metric("anticommutator_defect", worst_algebra);
    report.metric("sector_defect", worst_sector);
    report.check("ladder anticommutators", worst_algebra <= ALGEBRA_TOL, format!("{worst_algebra}"));
    report.check("two-body reduction preserves sector spectra", worst_sector <= SECTOR_TOL, format!("{worst_sector}"));
    report.check("phase estimation accepted a ground-band outcome", est.accepted, format!("{} trials", est.trials));
    report.check("energy within two p-bit bands of diagonalization", err <= tol, format!("{err} vs {tol}"));
    report.tables = vec![energy, algebra, sectors];
    Ok(report)
}
