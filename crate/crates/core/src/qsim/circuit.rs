use serde::{Deserialize, Serialize};

use super::gate::Gate;
use super::state::StateVector;
use crate::error::{Error, Result};

/// Ordered gate list on a fixed register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.check_range(self.num_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<&mut Self> {
        for g in gates {
            self.push(g)?;
        }
        Ok(self)
    }

    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.num_qubits > self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: other.num_qubits - 1,
                num_qubits: self.num_qubits,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(self)
    }

    /// `C†`: reversed order, each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn apply_to(&self, state: &mut StateVector) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::InvalidState(format!(
                "circuit on {} qubits applied to {}-qubit state",
                self.num_qubits,
                state.num_qubits()
            )));
        }
        for g in &self.gates {
            state.apply(g)?;
        }
        Ok(())
    }

    /// Runs the circuit from `|0…0⟩`.
    pub fn run(&self) -> Result<StateVector> {
        let mut s = StateVector::zero(self.num_qubits)?;
        self.apply_to(&mut s)?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_checks_range() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::h(1)).is_ok());
        assert!(c.push(Gate::h(2)).is_err());
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn inverse_undoes() {
        let mut c = Circuit::new(3);
        c.extend([
            Gate::h(0),
            Gate::s(1),
            Gate::cnot(0, 2).unwrap(),
            Gate::single(super::super::SingleOp::Basis(1.1), 1),
        ])
        .unwrap();
        let mut s = c.run().unwrap();
        c.inverse().apply_to(&mut s).unwrap();
        assert!(s.max_abs_diff(&StateVector::zero(3).unwrap()) < 1e-12);
    }
}
