//! Worst-case certification of a measured violation from an estimate of the
//! fraction of valid state preparations, plus gate counting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ewfs::{EwfsBuilder, FriendKind, MeasurementAngles, Setting};
use crate::qsim::{Circuit, Gate, NoiseModel};

/// `2√2`, the quantum maximum of `X̃` for the CHSH-type forms.
pub const X_TILDE_MAX: f64 = 2.0 * std::f64::consts::SQRT_2;
/// Local bound on `X̃`.
pub const X_TILDE_CLASSICAL: f64 = 2.0;

/// `(x̃ + 8(q − 1)) / q`: the smallest value the valid runs can have, if every
/// invalid run pushed `x̃` up by as much as it could.
pub fn worst_case_valid_x(x_tilde: f64, q: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain(format!("q = {q} outside (0, 1]")));
    }
    // the factor 8 allows each invalid run an excursion of 8, so the
    // algebra is meaningful on [-8, 8] even though a CHSH value lies in [-4, 4]
    if !(x_tilde.abs() <= 8.0) {
        return Err(Error::Domain(format!(
            "x_tilde = {x_tilde} outside [-8, 8]"
        )));
    }
    Ok((x_tilde + 8.0 * (q - 1.0)) / q)
}

/// Smallest `q` for which `x̃_max` can still certify: `(8 − x̃_max)/6`.
pub fn min_valid_probability(x_tilde_max: f64) -> Result<f64> {
    if !(X_TILDE_CLASSICAL..=4.0).contains(&x_tilde_max) {
        return Err(Error::Domain(format!(
            "x_tilde_max = {x_tilde_max} outside [2, 4]; no q <= 1 certifies it"
        )));
    }
    Ok((8.0 - x_tilde_max) / 6.0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub singles: u64,
    pub doubles: u64,
    /// Some gate was charged a synthesis bound rather than an exact count.
    pub bounded: bool,
}

impl GateCounts {
    pub fn new(singles: u64, doubles: u64) -> Self {
        Self {
            singles,
            doubles,
            bounded: false,
        }
    }

    pub fn total_weight(&self) -> u64 {
        self.singles + 2 * self.doubles
    }
}

impl std::ops::Add for GateCounts {
    type Output = GateCounts;

    fn add(self, rhs: GateCounts) -> GateCounts {
        GateCounts {
            singles: self.singles + rhs.singles,
            doubles: self.doubles + rhs.doubles,
            bounded: self.bounded || rhs.bounded,
        }
    }
}

/// `(1 − p1)^singles (1 − p2)^doubles`.
pub fn depolarizing_fidelity(counts: &GateCounts, p1: f64, p2: f64) -> Result<f64> {
    for (name, p) in [("p1", p1), ("p2", p2)] {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidProbability { name, value: p });
        }
    }
    Ok((1.0 - p1).powf(counts.singles as f64) * (1.0 - p2).powf(counts.doubles as f64))
}

/// Largest `p2` (with `p1 = ratio·p2`) keeping the depolarizing product at or
/// above `target`, by bisection.
pub fn max_two_qubit_error(counts: &GateCounts, p1_ratio: f64, target: f64) -> Result<f64> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::Domain(format!(
            "target fidelity {target} outside (0, 1]"
        )));
    }
    if !(p1_ratio >= 0.0) {
        return Err(Error::Domain(format!("p1 ratio {p1_ratio} must be >= 0")));
    }
    let fidelity = |p2: f64| {
        let p1 = (p1_ratio * p2).min(1.0 - 1e-15);
        (1.0 - p1).powf(counts.singles as f64) * (1.0 - p2).powf(counts.doubles as f64)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-15);
    if fidelity(hi) >= target {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fidelity(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Two-qubit gates charged for a generic `k`-qubit unitary:
/// `max(1, ceil(4^k/9 − k/3 − 1/9))`.
pub fn generic_synthesis_doubles(k: usize) -> u64 {
    let exact = (4f64.powi(k as i32) - 3.0 * k as f64 - 1.0) / 9.0;
    (exact.ceil() as u64).max(1)
}

pub fn count_gate(gate: &Gate) -> GateCounts {
    match gate {
        Gate::Single { .. } => GateCounts::new(1, 0),
        Gate::Cnot { .. } => GateCounts::new(0, 1),
        Gate::Dense { qubits, .. } if qubits.len() == 1 => GateCounts::new(1, 0),
        Gate::Dense { qubits, .. } => GateCounts {
            singles: 0,
            doubles: generic_synthesis_doubles(qubits.len()),
            bounded: qubits.len() > 2,
        },
        Gate::Controlled { targets, .. } => GateCounts {
            singles: 0,
            doubles: generic_synthesis_doubles(targets.len()),
            bounded: true,
        },
    }
}

pub fn count_gates(circuit: &Circuit) -> GateCounts {
    count_gates_in(circuit.gates())
}

pub fn count_gates_in(gates: &[Gate]) -> GateCounts {
    gates
        .iter()
        .map(count_gate)
        .fold(GateCounts::default(), |a, b| a + b)
}

/// Gate counts for one friend inside a full EWFS circuit (Debbie a single
/// qubit).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FriendResources {
    pub friend: FriendKind,
    pub qubits: usize,
    /// Singlet, basis change and both friends' measurements.
    pub preparation: GateCounts,
    /// Largest complete circuit over Alice's settings.
    pub circuit: GateCounts,
}

pub fn friend_resources(friend: &FriendKind) -> Result<FriendResources> {
    friend.validate()?;
    let angles = MeasurementAngles::historical();
    let builder = EwfsBuilder::new(*friend, FriendKind::Ghz { n: 1 }, angles)?;
    let mut preparation = GateCounts::default();
    let mut circuit = GateCounts::default();
    for x in Setting::ALL {
        let c = builder.circuit(x, Setting::Reverse1)?;
        preparation = count_gates(&c.friend_preparation());
        let full = count_gates(&c.circuit);
        if full.total_weight() > circuit.total_weight() {
            circuit = full;
        }
    }
    Ok(FriendResources {
        friend: *friend,
        qubits: builder.layout().num_qubits(),
        preparation,
        circuit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub q: f64,
    pub x_tilde: f64,
    pub x_tilde_std: f64,
    pub x_valid_lower: f64,
    pub q_min: f64,
    pub certified: bool,
    pub counts: GateCounts,
}

/// Certifies `x̃` (a CHSH-type LHS plus 2) measured with `counts` gates
/// under `noise`, using its lower `k`-sigma edge.
pub fn certify(
    x_tilde_mean: f64,
    x_tilde_std: f64,
    sigmas: f64,
    counts: &GateCounts,
    noise: &NoiseModel,
) -> Result<ValidationReport> {
    let q = depolarizing_fidelity(counts, noise.p1(), noise.p2())?;
    let edge = (x_tilde_mean - sigmas * x_tilde_std).clamp(-4.0, 4.0);
    let x_valid_lower = if q > 0.0 {
        worst_case_valid_x(edge, q)?
    } else {
        // no valid runs at all: report the floor of the range
        -8.0
    };
    Ok(ValidationReport {
        q,
        x_tilde: x_tilde_mean,
        x_tilde_std,
        x_valid_lower,
        q_min: min_valid_probability(X_TILDE_MAX)?,
        certified: x_valid_lower >= X_TILDE_CLASSICAL,
        counts: *counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ewfs::singlet_prep;
    use crate::qsim::DepolarizingScope;

    #[test]
    fn worst_case_examples() {
        assert_eq!(worst_case_valid_x(2.5, 1.0).unwrap(), 2.5);
        assert!((worst_case_valid_x(2.828427, 0.861929).unwrap() - 2.0).abs() < 1e-3);
        assert!((worst_case_valid_x(2.0, 0.99).unwrap() - 1.939_393_9).abs() < 1e-6);
        assert!(worst_case_valid_x(2.0, 0.0).is_err());
        assert!(worst_case_valid_x(8.5, 0.5).is_err());
    }

    #[test]
    fn consistency_identity() {
        for i in 1..=100 {
            let q = i as f64 / 100.0;
            let x = worst_case_valid_x(8.0 - 6.0 * q, q).unwrap();
            assert!((x - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn min_probability() {
        assert!((min_valid_probability(2.828427).unwrap() - 0.861929).abs() < 1e-5);
        assert_eq!(min_valid_probability(2.0).unwrap(), 1.0);
        assert!(min_valid_probability(8.0).is_err());
        assert!(min_valid_probability(1.9).is_err());
    }

    #[test]
    fn fidelity_product() {
        assert_eq!(
            depolarizing_fidelity(&GateCounts::new(7, 3), 0.0, 0.0).unwrap(),
            1.0
        );
        assert_eq!(
            depolarizing_fidelity(&GateCounts::new(0, 1), 0.0, 0.5).unwrap(),
            0.5
        );
        assert!(depolarizing_fidelity(&GateCounts::new(0, 1), 0.0, 1.0).is_err());
    }

    #[test]
    fn threshold_solver() {
        let p2 = max_two_qubit_error(&GateCounts::new(100, 10), 0.1, 2.0 / 2.828427).unwrap();
        assert!((p2 - 0.0173).abs() < 5e-4, "{p2}");
    }

    #[test]
    fn counts() {
        let mut c = Circuit::new(4);
        c.extend(crate::ewfs::friend_unitary(&FriendKind::Ghz { n: 3 }, 0, &[1, 2, 3]).unwrap())
            .unwrap();
        assert_eq!(count_gates(&c), GateCounts::new(0, 3));
        let mut s = Circuit::new(2);
        s.extend(singlet_prep(0, 1).unwrap()).unwrap();
        assert_eq!(count_gates(&s), GateCounts::new(3, 1));
        let mut d = Circuit::new(5);
        d.extend(
            crate::ewfs::friend_unitary(&FriendKind::Dicke { n: 4, k: 2 }, 0, &[1, 2, 3, 4])
                .unwrap(),
        )
        .unwrap();
        let g = count_gates(&d);
        assert!(g.bounded);
        assert_eq!(g.doubles, 27);
    }

    #[test]
    fn ghz_resources() {
        let r = friend_resources(&FriendKind::Ghz { n: 5 }).unwrap();
        assert_eq!(r.qubits, 8);
        // singlet (3 + 1), two basis changes, 5 + 1 ladder CNOTs
        assert_eq!(r.preparation, GateCounts::new(5, 7));
        assert!(r.circuit.total_weight() > r.preparation.total_weight());
        assert!(!r.circuit.bounded);
    }

    #[test]
    fn certification() {
        let quiet = NoiseModel::noiseless();
        let r = certify(2.82, 0.0, 3.0, &GateCounts::new(5, 5), &quiet).unwrap();
        assert!(r.certified && r.q == 1.0);
        let noisy = NoiseModel::depolarizing(0.0, 0.03, DepolarizingScope::Global).unwrap();
        let r = certify(X_TILDE_MAX, 0.0, 3.0, &GateCounts::new(0, 20), &noisy).unwrap();
        assert!((r.q - 0.97f64.powi(20)).abs() < 1e-12);
        assert!(r.q < r.q_min && !r.certified);
    }
}
