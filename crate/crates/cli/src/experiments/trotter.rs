use qsim_core::random::stream_rng;
use qsim_core::trotter::{build_plan, exponential_count, plan_error, random_two_local, TrotterPlan};

use super::{slope, spec};
use crate::config::{non_empty_positive, positive, Kind, ParamSpec, Params, Value};
use crate::error::CliError;
use crate::report::{num, Report, Table};

pub fn specs() -> Vec<ParamSpec> {
    vec![
        spec("qubits", Kind::Int, || Value::Int(3), positive, "register size of each random Hamiltonian"),
        spec("hamiltonians", Kind::Int, || Value::Int(20), positive, "number of random 2-local Hamiltonians"),
        spec("time", Kind::Float, || Value::Float(1.0), positive, "total evolution time"),
        spec("slices", Kind::IntList, || Value::IntList(vec![4, 8, 16, 32]), non_empty_positive, "slice counts (Δt = time/slices)"),
        spec("orders", Kind::IntList, || Value::IntList(vec![2, 4]), orders_ok, "product-formula orders: 1, 2 or 4"),
        spec("count_max_terms", Kind::Int, || Value::Int(6), positive, "largest term count in the exponential-count table"),
        spec("count_max_half_order", Kind::Int, || Value::Int(3), positive, "largest k in the S_2k exponential-count table"),
    ]
}

fn orders_ok(v: &Value) -> Result<(), String> {
    match v {
        Value::IntList(l) if !l.is_empty() && l.iter().all(|o| [1, 2, 4].contains(o)) => Ok(()),
        _ => Err("orders must be a non-empty subset of {1, 2, 4}".into()),
    }
}

/// Accepted slope interval for a given order.
pub fn slope_window(order: u32) -> (f64, f64) {
    match order {
        1 => (0.8, 1.2),
        2 => (1.8, 2.2),
        _ => (3.7, 4.3),
    }
}

pub fn run(p: &Params, seed: u64) -> Result<Report, CliError> {
    let n = p.usize("qubits");
    let t = p.f64("time");
    let slices = p.usize_list("slices");
    let orders = p.usize_list("orders");
    let mut report = Report::default();
    let mut errors = Table::new("trotter_scaling.csv", &["hamiltonian", "order", "slices", "dt", "exponentials", "error"]);
    let mut slopes = Table::new("trotter_slopes.csv", &["hamiltonian", "order", "slope", "lower", "upper", "passed"]);
    let dts: Vec<f64> = slices.iter().map(|&s| t / s as f64).collect();
    let mut worst: Vec<(u32, f64, f64)> = orders.iter().map(|&o| (o as u32, f64::INFINITY, f64::NEG_INFINITY)).collect();
    let mut all_in = true;
    for h in 0..p.usize("hamiltonians") {
        let terms = random_two_local(n, &mut stream_rng(seed, h as u64));
        for (oi, &order) in orders.iter().enumerate() {
            let order = order as u32;
            let mut errs = Vec::with_capacity(slices.len());
            for (&s, &dt) in slices.iter().zip(&dts) {
                let plan = build_plan(&terms, t, order, s)?;
                let e = plan_error(&terms, n, &plan)?;
                errors.push(vec![h.to_string(), order.to_string(), s.to_string(), num(dt), plan.exponential_count().to_string(), num(e)]);
                errs.push(e);
            }
            let k = slope(&dts, &errs);
            let (lo, hi) = slope_window(order);
            let ok = (lo..=hi).contains(&k);
            all_in &= ok;
            worst[oi].1 = worst[oi].1.min(k);
            worst[oi].2 = worst[oi].2.max(k);
            slopes.push(vec![h.to_string(), order.to_string(), num(k), num(lo), num(hi), ok.to_string()]);
        }
    }
    for (order, lo, hi) in &worst {
        report.metric(&format!("slope_min_order{order}"), *lo);
        report.metric(&format!("slope_max_order{order}"), *hi);
    }
    report.check("error slopes inside the order window", all_in, format!("{worst:?}"));

    let mut counts = Table::new("exponential_counts.csv", &["terms", "half_order", "emitted", "formula"]);
    let mut counts_ok = true;
    for m in 1..=p.usize("count_max_terms") {
        for k in 1..=p.usize("count_max_half_order") as u32 {
            let emitted = TrotterPlan::new(m, 1.0, 2 * k, 1)?.exponential_count();
            let formula = exponential_count(m, k);
            counts_ok &= emitted == formula;
            counts.push(vec![m.to_string(), k.to_string(), emitted.to_string(), formula.to_string()]);
        }
    }
    report.check("emitted exponential counts equal the closed form", counts_ok, "");
    report.tables = vec![errors, slopes, counts];
    Ok(report)
}
