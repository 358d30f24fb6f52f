use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::Circuit;
use super::gate::Gate;
use super::state::StateVector;
use crate::error::{check_probability, Error, Result};

/// Which qubits a depolarizing event scrambles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepolarizingScope {
    /// `ε(ρ) = (1−p)ρ + p·I/2^N` on the whole register.
    #[default]
    Global,
    /// `ε(ρ) = (1−p)ρ + p·Tr_g(ρ) ⊗ I_g/2^k` on the gate's own `k` qubits.
    Local,
}

impl fmt::Display for DepolarizingScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DepolarizingScope::Global => "global",
            DepolarizingScope::Local => "local",
        })
    }
}

impl FromStr for DepolarizingScope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "global" => Ok(Self::Global),
            "local" => Ok(Self::Local),
            other => Err(Error::Config(format!(
                "unknown depolarizing scope '{other}'"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    p1: f64,
    p2: f64,
    p_readout: f64,
    scope: DepolarizingScope,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, p_readout: f64, scope: DepolarizingScope) -> Result<Self> {
        Ok(Self {
            p1: check_probability("p1", p1)?,
            p2: check_probability("p2", p2)?,
            p_readout: check_probability("p_readout", p_readout)?,
            scope,
        })
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn depolarizing(p1: f64, p2: f64, scope: DepolarizingScope) -> Result<Self> {
        Self::new(p1, p2, 0.0, scope)
    }

    pub fn with_readout(mut self, p_readout: f64) -> Result<Self> {
        self.p_readout = check_probability("p_readout", p_readout)?;
        Ok(self)
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }
    pub fn p2(&self) -> f64 {
        self.p2
    }
    pub fn p_readout(&self) -> f64 {
        self.p_readout
    }
    pub fn scope(&self) -> DepolarizingScope {
        self.scope
    }

    pub fn has_depolarizing(&self) -> bool {
        self.p1 > 0.0 || self.p2 > 0.0
    }

    /// Depolarizing probability attached to `gate`.
    pub fn gate_probability(&self, gate: &Gate) -> f64 {
        if gate.weight() == 1 {
            self.p1
        } else {
            self.p2
        }
    }

    /// `Π_g (1 − p_g)` over the circuit's gates: the global-scope survival
    /// probability of the ideal state.
    pub fn circuit_fidelity(&self, circuit: &Circuit) -> f64 {
        circuit
            .gates()
            .iter()
            .map(|g| 1.0 - self.gate_probability(g))
            .product()
    }
}

/// Draws a uniformly random Pauli (identity included) on each listed qubit
/// and returns the `(x_mask, z_mask)` pair.
pub(crate) fn random_pauli_masks<R: Rng + ?Sized>(
    qubits: impl Iterator<Item = usize>,
    rng: &mut R,
) -> (usize, usize) {
    let mut x = 0usize;
    let mut z = 0usize;
    for q in qubits {
        match rng.random_range(0..4u8) {
            1 => x |= 1 << q,
            2 => {
                x |= 1 << q;
                z |= 1 << q;
            }
            3 => z |= 1 << q,
            _ => {}
        }
    }
    (x, z)
}

/// One Monte Carlo realization of the depolarized circuit: after each gate,
/// with probability `p_g`, a uniform Pauli string is applied on the whole
/// register (global scope) or on the gate's qubits (local scope). The
/// trajectory average reproduces the channel exactly.
pub fn run_noisy_trajectory<R: Rng + ?Sized>(
    circuit: &Circuit,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<StateVector> {
    let mut state = StateVector::zero(circuit.num_qubits())?;
    for gate in circuit.gates() {
        state.apply(gate)?;
        let p = noise.gate_probability(gate);
        if p > 0.0 && rng.random::<f64>() < p {
            let (x, z) = match noise.scope() {
                DepolarizingScope::Global => random_pauli_masks(0..circuit.num_qubits(), rng),
                DepolarizingScope::Local => random_pauli_masks(gate.qubits().into_iter(), rng),
            };
            state.apply_pauli_masks(x, z);
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::RngStream;

    #[test]
    fn validates_probabilities() {
        assert!(NoiseModel::new(0.1, 1.0, 0.0, DepolarizingScope::Global).is_ok());
        assert!(matches!(
            NoiseModel::new(-0.1, 0.0, 0.0, DepolarizingScope::Global),
            Err(Error::InvalidProbability { name: "p1", .. })
        ));
        assert!(NoiseModel::noiseless().with_readout(1.5).is_err());
    }

    #[test]
    fn zero_noise_trajectory_is_ideal() {
        let mut c = Circuit::new(3);
        c.extend([
            Gate::h(0),
            Gate::cnot(0, 1).unwrap(),
            Gate::cnot(1, 2).unwrap(),
        ])
        .unwrap();
        let ideal = c.run().unwrap();
        let mut rng = RngStream::new(1, 0).rng();
        let traj = run_noisy_trajectory(&c, &NoiseModel::noiseless(), &mut rng).unwrap();
        assert_eq!(ideal, traj);
    }

    #[test]
    fn circuit_fidelity_product() {
        let mut c = Circuit::new(2);
        c.extend([Gate::h(0), Gate::h(1), Gate::cnot(0, 1).unwrap()])
            .unwrap();
        let n = NoiseModel::depolarizing(0.1, 0.5, DepolarizingScope::Global).unwrap();
        assert!((n.circuit_fidelity(&c) - 0.9 * 0.9 * 0.5).abs() < 1e-15);
    }
}
