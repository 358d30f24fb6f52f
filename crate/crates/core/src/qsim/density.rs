//! Exact density-matrix simulation of the depolarized circuit, used as an
//! oracle for the trajectory engine and as an exact backend on small
//! registers.

use num_complex::Complex64 as C64;

use super::circuit::Circuit;
use super::gate::Gate;
use super::kernel;
use super::noise::{DepolarizingScope, NoiseModel};
use super::state::{marginalize, StateVector};
use crate::error::{Error, Result};

/// Largest register for which the density backend is used automatically.
pub const DENSITY_MAX_QUBITS: usize = 10;

/// `ρ` stored as a vector over `2N` qubits: entry `(r, c)` lives at index
/// `r | c << N`, so `UρU†` is `U` on the low half and `conj(U)` on the high half.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    num_qubits: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn from_state(state: &StateVector) -> Result<Self> {
        let n = state.num_qubits();
        if 2 * n > super::state::MAX_QUBITS {
            return Err(Error::Infeasible(format!("density matrix on {n} qubits")));
        }
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for c in 0..dim {
            let cc = amps[c].conj();
            for r in 0..dim {
                data[r | c << n] = amps[r] * cc;
            }
        }
        Ok(Self {
            num_qubits: n,
            data,
        })
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::from_state(&StateVector::zero(num_qubits)?)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row | col << self.num_qubits]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    pub fn marginal(&self, qubits: &[usize]) -> Vec<f64> {
        marginalize(&self.diagonal(), qubits)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.check_range(self.num_qubits)?;
        let n = self.num_qubits;
        match gate {
            Gate::Single { op, qubit } => {
                let m = op.matrix();
                kernel::apply_1q(&mut self.data, *qubit, m);
                kernel::apply_1q(&mut self.data, *qubit + n, m.map(|z| z.conj()));
            }
            Gate::Cnot { control, target } => {
                kernel::apply_cnot(&mut self.data, *control, *target);
                kernel::apply_cnot(&mut self.data, *control + n, *target + n);
            }
            Gate::Dense { qubits, matrix, .. } => {
                let hi: Vec<usize> = qubits.iter().map(|q| q + n).collect();
                kernel::apply_dense(&mut self.data, qubits, None, matrix);
                kernel::apply_dense(&mut self.data, &hi, None, &matrix.conj());
            }
            Gate::Controlled {
                control,
                targets,
                unitary,
                ..
            } => {
                let hi: Vec<usize> = targets.iter().map(|q| q + n).collect();
                kernel::apply_dense(&mut self.data, targets, Some(*control), unitary);
                kernel::apply_dense(&mut self.data, &hi, Some(control + n), &unitary.conj());
            }
        }
        Ok(())
    }

    /// `ρ → (1−p)ρ + p·I/2^N`.
    pub fn depolarize_global(&mut self, p: f64) {
        let tr = self.trace();
        let dim = self.dim();
        for z in self.data.iter_mut() {
            *z *= 1.0 - p;
        }
        for i in 0..dim {
            let idx = i | i << self.num_qubits;
            self.data[idx] += tr * (p / dim as f64);
        }
    }

    /// `ρ → (1−p)ρ + p·(1/4^k)Σ_P PρP` over Paulis on `qubits`.
    pub fn depolarize_local(&mut self, p: f64, qubits: &[usize]) {
        let mut twirled = self.data.clone();
        for &q in qubits {
            twirl_qubit(&mut twirled, q, self.num_qubits);
        }
        for (z, t) in self.data.iter_mut().zip(twirled) {
            *z = (1.0 - p) * *z + p * t;
        }
    }
}

/// Full single-qubit twirl `(1/4)Σ_P PρP`: keeps entries diagonal in qubit
/// `q`, averaged over its two values; zeroes the coherences.
fn twirl_qubit(data: &mut [C64], q: usize, n: usize) {
    let rbit = 1usize << q;
    let cbit = 1usize << (q + n);
    for idx in 0..data.len() {
        if idx & rbit != 0 || idx & cbit != 0 {
            continue;
        }
        let a = data[idx];
        let b = data[idx | rbit | cbit];
        let avg = (a + b) * 0.5;
        data[idx] = avg;
        data[idx | rbit | cbit] = avg;
        data[idx | rbit] = C64::new(0.0, 0.0);
        data[idx | cbit] = C64::new(0.0, 0.0);
    }
}

/// Exact output of the depolarized circuit from `|0…0⟩` (readout noise excluded).
pub fn run_channel(circuit: &Circuit, noise: &NoiseModel) -> Result<DensityMatrix> {
    let mut rho = DensityMatrix::zero(circuit.num_qubits())?;
    for gate in circuit.gates() {
        rho.apply(gate)?;
        let p = noise.gate_probability(gate);
        if p > 0.0 {
            match noise.scope() {
                DepolarizingScope::Global => rho.depolarize_global(p),
                DepolarizingScope::Local => rho.depolarize_local(p, &gate.qubits()),
            }
        }
    }
    Ok(rho)
}
