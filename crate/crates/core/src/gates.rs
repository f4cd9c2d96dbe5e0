//! The elementary gate set.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::dense::{Matrix, C64, I, ONE, ZERO};
use crate::error::{QsimError, Result};
use crate::operators::GateMatrix;

/// Named gates. Two-qubit matrices use textbook tensor order: the first
/// factor is local bit 1 (so CNOT's control is `targets[1]`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StandardGate {
    H,
    X,
    Y,
    Z,
    Cnot,
    Swap,
    /// `exp(-iσˣθ/2)`
    Rx(f64),
    /// `exp(-iσʸθ/2)`
    Ry(f64),
    /// `exp(-iσᶻθ/2)`
    Rz(f64),
    /// `|0⟩⟨0| − i e^{iγ} |1⟩⟨1|`, the cooling-circuit phase gate.
    RzPhase(f64),
    /// `|0⟩⟨0| + e^{iθ} |1⟩⟨1|`
    Phase(f64),
    /// `|0⟩⟨0| + e^{−2πi/2ᵏ} |1⟩⟨1|`
    Rk(u32),
}

impl StandardGate {
    /// Parses a gate by name with its parameter list.
    pub fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if params.len() != n {
                return Err(QsimError::InvalidArgument(format!(
                    "gate `{name}` takes {n} parameter(s), got {}",
                    params.len()
                )));
            }
            if params.iter().any(|p| !p.is_finite()) {
                return Err(QsimError::NonFiniteParameter(name.to_string()));
            }
            Ok(())
        };
        let gate = match name.to_ascii_lowercase().as_str() {
            "h" => want(0).map(|_| Self::H)?,
            "x" => want(0).map(|_| Self::X)?,
            "y" => want(0).map(|_| Self::Y)?,
            "z" => want(0).map(|_| Self::Z)?,
            "cnot" | "cx" => want(0).map(|_| Self::Cnot)?,
            "swap" => want(0).map(|_| Self::Swap)?,
            "rx" => want(1).map(|_| Self::Rx(params[0]))?,
            "ry" => want(1).map(|_| Self::Ry(params[0]))?,
            "rz" => want(1).map(|_| Self::Rz(params[0]))?,
            "rz_phase" => want(1).map(|_| Self::RzPhase(params[0]))?,
            "phase" | "p" => want(1).map(|_| Self::Phase(params[0]))?,
            "r_k" | "rk" => {
                want(1)?;
                let k = params[0];
                if k < 0.0 || k.fract() != 0.0 {
                    return Err(QsimError::InvalidArgument(format!("R_k needs a non-negative integer k, got {k}")));
                }
                Self::Rk(k as u32)
            }
            _ => return Err(QsimError::UnknownGate(name.to_string())),
        };
        Ok(gate)
    }

    fn parameter(&self) -> Option<f64> {
        match *self {
            Self::Rx(t) | Self::Ry(t) | Self::Rz(t) | Self::RzPhase(t) | Self::Phase(t) => Some(t),
            _ => None,
        }
    }
}

fn m2(a: C64, b: C64, c: C64, d: C64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[a, b, c, d])
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Builds the unitary for a named gate.
pub fn standard_gate(gate: StandardGate) -> Result<GateMatrix> {
    if gate.parameter().is_some_and(|p| !p.is_finite()) {
        return Err(QsimError::NonFiniteParameter(format!("{gate:?}")));
    }
    let (label, m) = match gate {
        StandardGate::H => {
            let h = re(FRAC_1_SQRT_2);
            ("H".to_string(), m2(h, h, h, -h))
        }
        StandardGate::X => ("X".into(), m2(ZERO, ONE, ONE, ZERO)),
        StandardGate::Y => ("Y".into(), m2(ZERO, -I, I, ZERO)),
        StandardGate::Z => ("Z".into(), m2(ONE, ZERO, ZERO, -ONE)),
        StandardGate::Cnot => {
            // |1⟩⟨1| ⊗ X + |0⟩⟨0| ⊗ I, control on local bit 1
            let mut m = Matrix::identity(4, 4);
            m[(2, 2)] = ZERO;
            m[(3, 3)] = ZERO;
            m[(2, 3)] = ONE;
            m[(3, 2)] = ONE;
            ("CNOT".into(), m)
        }
        StandardGate::Swap => {
            let mut m = Matrix::identity(4, 4);
            m[(1, 1)] = ZERO;
            m[(2, 2)] = ZERO;
            m[(1, 2)] = ONE;
            m[(2, 1)] = ONE;
            ("SWAP".into(), m)
        }
        StandardGate::Rx(t) => {
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            (format!("Rx({t})"), m2(re(c), C64::new(0.0, -s), C64::new(0.0, -s), re(c)))
        }
        StandardGate::Ry(t) => {
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            (format!("Ry({t})"), m2(re(c), re(-s), re(s), re(c)))
        }
        StandardGate::Rz(t) => (
            format!("Rz({t})"),
            m2(C64::from_polar(1.0, -t / 2.0), ZERO, ZERO, C64::from_polar(1.0, t / 2.0)),
        ),
        StandardGate::RzPhase(g) => (format!("Rz_phase({g})"), m2(ONE, ZERO, ZERO, -I * C64::from_polar(1.0, g))),
        StandardGate::Phase(t) => (format!("P({t})"), m2(ONE, ZERO, ZERO, C64::from_polar(1.0, t))),
        StandardGate::Rk(k) => {
            let angle = -2.0 * PI / 2f64.powi(k as i32);
            (format!("R_{k}"), m2(ONE, ZERO, ZERO, C64::from_polar(1.0, angle)))
        }
    };
    Ok(GateMatrix::new_unchecked(label, m))
}

/// Convenience: parse and build in one step.
pub fn gate_by_name(name: &str, params: &[f64]) -> Result<GateMatrix> {
    standard_gate(StandardGate::parse(name, params)?)
}
