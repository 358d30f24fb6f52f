//! Dense statevector engine: gates, circuits, exact expectations, shot
//! sampling and depolarizing trajectories.

mod circuit;
pub mod density;
mod expectation;
mod gate;
mod kernel;
mod matrix;
mod noise;
mod rng;
mod sampling;
mod state;

pub use circuit::Circuit;
pub use density::{run_channel, DensityMatrix, DENSITY_MAX_QUBITS};
pub use expectation::{
    exact_pair_expectation, pair_expectation_from_probabilities,
    single_expectation_from_probabilities,
};
pub use gate::{Gate, SingleOp};
pub use matrix::Matrix;
pub use noise::{run_noisy_trajectory, DepolarizingScope, NoiseModel};
pub use rng::{mix64, RngStream};
pub use sampling::{apply_readout, sample_shot, BitString, OutcomeDistribution};
pub use state::{extract_bits, StateVector, MAX_QUBITS};

pub use num_complex::Complex64 as C64;
