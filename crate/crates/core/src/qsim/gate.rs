use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::error::{Error, Result};

const UNITARY_TOL: f64 = 1e-10;

/// Named single-qubit operations. Basis-change angles are in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SingleOp {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    /// `M(θ) = H·diag(1, e^{−iθ})`: maps `(|0⟩ ± e^{iθ}|1⟩)/√2` to `|0⟩` / `|1⟩`.
    Basis(f64),
    BasisDagger(f64),
}

impl SingleOp {
    pub fn matrix(self) -> [C64; 4] {
        let r = |x: f64| C64::new(x, 0.0);
        let s = FRAC_1_SQRT_2;
        match self {
            SingleOp::H => [r(s), r(s), r(s), r(-s)],
            SingleOp::X => [r(0.0), r(1.0), r(1.0), r(0.0)],
            SingleOp::Y => [r(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), r(0.0)],
            SingleOp::Z => [r(1.0), r(0.0), r(0.0), r(-1.0)],
            SingleOp::S => [r(1.0), r(0.0), r(0.0), C64::new(0.0, 1.0)],
            SingleOp::Sdg => [r(1.0), r(0.0), r(0.0), C64::new(0.0, -1.0)],
            SingleOp::Basis(theta) => {
                let e = C64::from_polar(s, -theta);
                [r(s), e, r(s), -e]
            }
            SingleOp::BasisDagger(theta) => {
                // adjoint of Basis(theta)
                let e = C64::from_polar(s, theta);
                [r(s), r(s), e, -e]
            }
        }
    }

    pub fn inverse(self) -> SingleOp {
        match self {
            SingleOp::S => SingleOp::Sdg,
            SingleOp::Sdg => SingleOp::S,
            SingleOp::Basis(t) => SingleOp::BasisDagger(t),
            SingleOp::BasisDagger(t) => SingleOp::Basis(t),
            other => other,
        }
    }
}

/// One circuit instruction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Single {
        op: SingleOp,
        qubit: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    /// Arbitrary unitary on `qubits`; matrix bit `j` ↔ `qubits[j]`.
    Dense {
        label: String,
        qubits: Vec<usize>,
        matrix: Arc<Matrix>,
    },
    /// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U` with `U` acting on `targets`.
    Controlled {
        label: String,
        control: usize,
        targets: Vec<usize>,
        unitary: Arc<Matrix>,
    },
}

fn check_distinct(qubits: &[usize]) -> Result<()> {
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::OverlappingQubits(qubits.to_vec()));
    }
    Ok(())
}

fn check_matrix(matrix: &Matrix, targets: usize) -> Result<()> {
    if matrix.dim() != 1usize << targets {
        return Err(Error::DimensionMismatch {
            dim: matrix.dim(),
            qubits: targets,
        });
    }
    let err = matrix.unitarity_error();
    if err >= UNITARY_TOL {
        return Err(Error::NotUnitary(err));
    }
    Ok(())
}

impl Gate {
    pub fn single(op: SingleOp, qubit: usize) -> Gate {
        Gate::Single { op, qubit }
    }
    pub fn h(q: usize) -> Gate {
        Gate::single(SingleOp::H, q)
    }
    pub fn x(q: usize) -> Gate {
        Gate::single(SingleOp::X, q)
    }
    pub fn y(q: usize) -> Gate {
        Gate::single(SingleOp::Y, q)
    }
    pub fn z(q: usize) -> Gate {
        Gate::single(SingleOp::Z, q)
    }
    pub fn s(q: usize) -> Gate {
        Gate::single(SingleOp::S, q)
    }

    pub fn cnot(control: usize, target: usize) -> Result<Gate> {
        check_distinct(&[control, target])?;
        Ok(Gate::Cnot { control, target })
    }

    pub fn dense(label: impl Into<String>, qubits: Vec<usize>, matrix: Matrix) -> Result<Gate> {
        check_distinct(&qubits)?;
        check_matrix(&matrix, qubits.len())?;
        Ok(Gate::Dense {
            label: label.into(),
            qubits,
            matrix: Arc::new(matrix),
        })
    }

    pub fn controlled(
        label: impl Into<String>,
        control: usize,
        targets: Vec<usize>,
        unitary: Matrix,
    ) -> Result<Gate> {
        Self::controlled_shared(label, control, targets, Arc::new(unitary))
    }

    pub fn controlled_shared(
        label: impl Into<String>,
        control: usize,
        targets: Vec<usize>,
        unitary: Arc<Matrix>,
    ) -> Result<Gate> {
        if targets.is_empty() {
            return Err(Error::DimensionMismatch {
                dim: unitary.dim(),
                qubits: 0,
            });
        }
        let mut all = targets.clone();
        all.push(control);
        check_distinct(&all)?;
        check_matrix(&unitary, targets.len())?;
        Ok(Gate::Controlled {
            label: label.into(),
            control,
            targets,
            unitary,
        })
    }

    /// Every qubit the gate touches (control first for controlled gates).
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Single { qubit, .. } => vec![*qubit],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Dense { qubits, .. } => qubits.clone(),
            Gate::Controlled {
                control, targets, ..
            } => std::iter::once(*control)
                .chain(targets.iter().copied())
                .collect(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Gate::Single { .. } => 1,
            Gate::Cnot { .. } => 2,
            Gate::Dense { qubits, .. } => qubits.len(),
            Gate::Controlled { targets, .. } => targets.len() + 1,
        }
    }

    /// Weighted size used by gate counting: 1 for single-qubit gates, 2 otherwise.
    pub fn weight(&self) -> u32 {
        if self.arity() == 1 {
            1
        } else {
            2
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Single { op, qubit } => Gate::Single {
                op: op.inverse(),
                qubit: *qubit,
            },
            Gate::Cnot { .. } => self.clone(),
            Gate::Dense {
                label,
                qubits,
                matrix,
            } => Gate::Dense {
                label: format!("{label}†"),
                qubits: qubits.clone(),
                matrix: Arc::new(matrix.adjoint()),
            },
            Gate::Controlled {
                label,
                control,
                targets,
                unitary,
            } => Gate::Controlled {
                label: format!("{label}†"),
                control: *control,
                targets: targets.clone(),
                unitary: Arc::new(unitary.adjoint()),
            },
        }
    }

    pub(crate) fn check_range(&self, num_qubits: usize) -> Result<()> {
        for index in self.qubits() {
            if index >= num_qubits {
                return Err(Error::QubitOutOfRange { index, num_qubits });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Single { op, qubit } => match op {
                SingleOp::Basis(t) => write!(f, "M({:.3}°) q{qubit}", t.to_degrees()),
                SingleOp::BasisDagger(t) => write!(f, "M({:.3}°)† q{qubit}", t.to_degrees()),
                other => write!(f, "{other:?} q{qubit}"),
            },
            Gate::Cnot { control, target } => write!(f, "CNOT q{control}->q{target}"),
            Gate::Dense { label, qubits, .. } => write!(f, "{label} {qubits:?}"),
            Gate::Controlled {
                label,
                control,
                targets,
                ..
            } => write!(f, "C-{label} q{control}->{targets:?}"),
        }
    }
}
