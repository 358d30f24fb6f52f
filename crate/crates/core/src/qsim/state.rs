use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::gate::Gate;
use super::kernel;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Largest register the dense engine will allocate (2^30 amplitudes = 16 GiB).
pub const MAX_QUBITS: usize = 30;

/// Dense pure state over `2^num_qubits` basis states, qubit 0 = least
/// significant bit of the basis index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::InvalidState(format!(
                "register size {num_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} outside dimension {dim}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two ≥ 2 and the
    /// vector normalized within 1e-10.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "amplitude count {len} is not a power of two ≥ 2"
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("norm² = {norm}, expected 1")));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub(crate) fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for &index in qubits {
            if index >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    index,
                    num_qubits: self.num_qubits,
                });
            }
        }
        let mut sorted = qubits.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::OverlappingQubits(qubits.to_vec()));
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.check_range(self.num_qubits)?;
        match gate {
            Gate::Single { op, qubit } => kernel::apply_1q(&mut self.amps, *qubit, op.matrix()),
            Gate::Cnot { control, target } => kernel::apply_cnot(&mut self.amps, *control, *target),
            Gate::Dense { qubits, matrix, .. } => {
                kernel::apply_dense(&mut self.amps, qubits, None, matrix)
            }
            Gate::Controlled {
                control,
                targets,
                unitary,
                ..
            } => kernel::apply_dense(&mut self.amps, targets, Some(*control), unitary),
        }
        Ok(())
    }

    /// Applies `u` to `targets` on the branch where `control` is 1.
    pub fn apply_controlled_unitary(
        &mut self,
        control: usize,
        targets: &[usize],
        u: &Matrix,
    ) -> Result<()> {
        let mut all = targets.to_vec();
        all.push(control);
        self.check_qubits(&all)?;
        if u.dim() != 1usize << targets.len() {
            return Err(Error::DimensionMismatch {
                dim: u.dim(),
                qubits: targets.len(),
            });
        }
        kernel::apply_dense(&mut self.amps, targets, Some(control), u);
        Ok(())
    }

    /// Applies `X^{x_mask} Z^{z_mask}` up to the `i^{#Y}` convention of
    /// [`kernel::apply_pauli`].
    pub(crate) fn apply_pauli_masks(&mut self, x_mask: usize, z_mask: usize) {
        kernel::apply_pauli(&mut self.amps, x_mask, z_mask);
    }

    /// Marginal distribution of `qubits`; outcome bit `j` is `qubits[j]`.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.check_qubits(qubits)?;
        Ok(marginalize(&self.probabilities(), qubits))
    }
}

/// Extracts the bits of `index` at `qubits` into a compact little-endian word.
#[inline]
pub fn extract_bits(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | ((index >> q & 1) << j))
}

pub(crate) fn marginalize(probs: &[f64], qubits: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; 1usize << qubits.len()];
    for (z, p) in probs.iter().enumerate() {
        if *p != 0.0 {
            out[extract_bits(z, qubits)] += p;
        }
    }
    out
}
