//! Desk-scale digital quantum simulation.
//!
//! Dense state-vector and density-matrix simulation of the standard
//! quantum-simulation algorithm toolbox: Fourier transform and phase
//! estimation, product formulas, grid and second-quantized chemistry
//! dynamics, state preparation, adiabatic evolution, thermal-state updates,
//! algorithmic cooling and Lindblad channels. Every algorithm is paired with a
//! dense linear-algebra oracle in [`dense`].

// `!(x > 0.0)` style guards are kept so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adiabatic;
pub mod circuit;
pub mod cooling;
pub mod dense;
pub mod error;
pub mod firstq;
pub mod gates;
pub mod metrics;
pub mod models;
pub mod numeric;
pub mod openquantum;
pub mod operators;
pub mod random;
pub mod secondq;
pub mod spectral;
pub mod state;
pub mod stateprep;
pub mod thermal;
pub mod trotter;

pub use dense::{Matrix, C64};
pub use error::{QsimError, Result};
pub use gates::{standard_gate, StandardGate};
pub use metrics::{density_metrics, fidelity, state_metrics, trace_distance, StateMetrics};
pub use operators::{DensityMatrix, GateMatrix, HermitianOperator};
pub use state::{Measurement, StateVector};
