//! The experiment catalogue: one command per acceptance property.

use crate::config::{Kind, ParamSpec, Params, Value};
use crate::error::CliError;
use crate::report::Report;

mod adiabatic;
mod chemistry;
mod cooling;
mod lindblad;
mod spectral;
mod stateprep;
mod thermal;
mod trotter;
mod wavepacket;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Experiment {
    TrotterScaling,
    PeaPrecision,
    QftCheck,
    Wavepacket,
    H2Energy,
    Stateprep,
    AdiabaticSweep,
    ProbeMeasure,
    ThermalBound,
    ThermalChain,
    CoolingEnsemble,
    LindbladConverge,
}

impl Experiment {
    pub const ALL: [Experiment; 12] = [
        Experiment::TrotterScaling,
        Experiment::PeaPrecision,
        Experiment::QftCheck,
        Experiment::Wavepacket,
        Experiment::H2Energy,
        Experiment::Stateprep,
        Experiment::AdiabaticSweep,
        Experiment::ProbeMeasure,
        Experiment::ThermalBound,
        Experiment::ThermalChain,
        Experiment::CoolingEnsemble,
        Experiment::LindbladConverge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::TrotterScaling => "trotter-scaling",
            Experiment::PeaPrecision => "pea-precision",
            Experiment::QftCheck => "qft-check",
            Experiment::Wavepacket => "wavepacket",
            Experiment::H2Energy => "h2-energy",
            Experiment::Stateprep => "stateprep",
            Experiment::AdiabaticSweep => "adiabatic-sweep",
            Experiment::ProbeMeasure => "probe-measure",
            Experiment::ThermalBound => "thermal-bound",
            Experiment::ThermalChain => "thermal-chain",
            Experiment::CoolingEnsemble => "cooling-ensemble",
            Experiment::LindbladConverge => "lindblad-converge",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, CliError> {
        Self::ALL.into_iter().find(|e| e.name() == name).ok_or_else(|| {
            CliError::UnknownExperiment(name.into(), Self::ALL.map(|e| e.name()).join(", "))
        })
    }

    pub fn specs(self) -> Vec<ParamSpec> {
        match self {
            Experiment::TrotterScaling => trotter::specs(),
            Experiment::PeaPrecision => spectral::pea_specs(),
            Experiment::QftCheck => spectral::qft_specs(),
            Experiment::Wavepacket => wavepacket::specs(),
            Experiment::H2Energy => chemistry::specs(),
            Experiment::Stateprep => stateprep::specs(),
            Experiment::AdiabaticSweep => adiabatic::sweep_specs(),
            Experiment::ProbeMeasure => adiabatic::probe_specs(),
            Experiment::ThermalBound => thermal::bound_specs(),
            Experiment::ThermalChain => thermal::chain_specs(),
            Experiment::CoolingEnsemble => cooling::specs(),
            Experiment::LindbladConverge => lindblad::specs(),
        }
    }

    pub fn run(self, params: &Params, seed: u64) -> Result<Report, CliError> {
        match self {
            Experiment::TrotterScaling => trotter::run(params, seed),
            Experiment::PeaPrecision => spectral::run_pea(params, seed),
            Experiment::QftCheck => spectral::run_qft(params),
            Experiment::Wavepacket => wavepacket::run(params),
            Experiment::H2Energy => chemistry::run(params, seed),
            Experiment::Stateprep => stateprep::run(params),
            Experiment::AdiabaticSweep => adiabatic::run_sweep(params),
            Experiment::ProbeMeasure => adiabatic::run_probe(params, seed),
            Experiment::ThermalBound => thermal::run_bound(params, seed),
            Experiment::ThermalChain => thermal::run_chain(params, seed),
            Experiment::CoolingEnsemble => cooling::run(params, seed),
            Experiment::LindbladConverge => lindblad::run(params),
        }
    }
}

/// Shorthand for schema entries.
pub(crate) fn spec(
    key: &'static str,
    kind: Kind,
    default: fn() -> Value,
    check: crate::config::Check,
    doc: &'static str,
) -> ParamSpec {
    ParamSpec { key, kind, default, check, doc }
}

/// Ordinary least-squares slope of `ln y` against `ln x`.
pub(crate) fn slope(x: &[f64], y: &[f64]) -> f64 {
    qsim_core::trotter::log_log_slope(x, y)
}

/// True when every element is at most `ripple` (relative) above its predecessor
/// in a sequence expected to decrease.
pub(crate) fn decreasing_within(v: &[f64], ripple: f64) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] * (1.0 + ripple))
}
