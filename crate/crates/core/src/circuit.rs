//! Gate lists over abstract local qubits, mapped onto a register at apply time.

use crate::dense::{Matrix, ZERO};
use crate::error::{QsimError, Result};
use crate::gates::{standard_gate, StandardGate};
use crate::operators::GateMatrix;
use crate::state::StateVector;

#[derive(Clone, Debug)]
pub struct CircuitOp {
    pub gate: GateMatrix,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, ops: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn gate_count(&self) -> usize {
        self.ops.len()
    }

    pub fn push(&mut self, gate: GateMatrix, targets: &[usize], controls: &[usize]) {
        debug_assert!(targets.iter().chain(controls).all(|&q| q < self.n_qubits));
        self.ops.push(CircuitOp { gate, targets: targets.to_vec(), controls: controls.to_vec() });
    }

    pub fn push_standard(&mut self, gate: StandardGate, targets: &[usize], controls: &[usize]) -> Result<()> {
        self.push(standard_gate(gate)?, targets, controls);
        Ok(())
    }

    /// Reversed circuit of adjoint gates.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            ops: self
                .ops
                .iter()
                .rev()
                .map(|op| CircuitOp { gate: op.gate.adjoint(), targets: op.targets.clone(), controls: op.controls.clone() })
                .collect(),
        }
    }

    /// Applies the circuit with local qubit `j` placed on `qubits[j]`.
    pub fn apply(&self, state: &mut StateVector, qubits: &[usize]) -> Result<()> {
        if qubits.len() != self.n_qubits {
            return Err(QsimError::DimensionMismatch { expected: self.n_qubits, found: qubits.len() });
        }
        let mut t = Vec::new();
        let mut c = Vec::new();
        for op in &self.ops {
            t.clear();
            c.clear();
            t.extend(op.targets.iter().map(|&q| qubits[q]));
            c.extend(op.controls.iter().map(|&q| qubits[q]));
            state.apply(&op.gate, &t, &c)?;
        }
        Ok(())
    }

    /// Full unitary, built column by column from basis states.
    pub fn matrix(&self) -> Result<Matrix> {
        let dim = 1usize << self.n_qubits;
        let identity_map: Vec<usize> = (0..self.n_qubits).collect();
        let mut m = Matrix::from_element(dim, dim, ZERO);
        for x in 0..dim {
            let mut s = StateVector::basis(self.n_qubits, x)?;
            self.apply(&mut s, &identity_map)?;
            for (r, a) in s.amplitudes().iter().enumerate() {
                m[(r, x)] = *a;
            }
        }
        Ok(m)
    }
}
