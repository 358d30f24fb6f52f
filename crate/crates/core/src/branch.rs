//! Branch factor (interference minus distinguishability complexity) of a
//! friend's two pointer states, at δ = 1.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ewfs::FriendKind;
use crate::qsim::{Gate, Matrix, StateVector, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFlag {
    Exact,
    LowerBound,
    UpperBound,
    Asymptotic,
}

impl fmt::Display for BoundFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundFlag::Exact => "exact",
            BoundFlag::LowerBound => "lower_bound",
            BoundFlag::UpperBound => "upper_bound",
            BoundFlag::Asymptotic => "asymptotic",
        })
    }
}

impl BoundFlag {
    /// Flag of `a − b`.
    pub fn difference(a: BoundFlag, b: BoundFlag) -> BoundFlag {
        use BoundFlag::*;
        match (a, b) {
            (Exact, Exact) => Exact,
            (Asymptotic, _) | (_, Asymptotic) => Asymptotic,
            (Exact | LowerBound, Exact | UpperBound) => LowerBound,
            (Exact | UpperBound, Exact | LowerBound) => UpperBound,
            // mixed directions carry no guarantee either way; keep the
            // weaker reading
            _ => LowerBound,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounded {
    pub value: f64,
    pub flag: BoundFlag,
}

impl Bounded {
    pub fn new(value: f64, flag: BoundFlag) -> Self {
        Self { value, flag }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchFactorReport {
    pub friend: Option<FriendKind>,
    pub c_interference: Bounded,
    pub c_distinguishability: Bounded,
    pub branch_factor: Bounded,
    pub delta: f64,
    pub note: Option<String>,
}

impl BranchFactorReport {
    fn from_parts(
        friend: Option<FriendKind>,
        c_i: Bounded,
        c_d: Bounded,
        clamp: bool,
        note: Option<String>,
    ) -> Self {
        let mut b = c_i.value - c_d.value;
        if clamp {
            b = b.max(0.0);
        }
        Self {
            friend,
            c_interference: c_i,
            c_distinguishability: c_d,
            branch_factor: Bounded::new(b, BoundFlag::difference(c_i.flag, c_d.flag)),
            delta: 1.0,
            note,
        }
    }
}

pub fn branch_factor(kind: &FriendKind) -> Result<BranchFactorReport> {
    kind.validate()?;
    Ok(match *kind {
        FriendKind::Ghz { n } => BranchFactorReport::from_parts(
            Some(*kind),
            Bounded::new(n as f64, BoundFlag::Exact),
            Bounded::new(1.0, BoundFlag::Exact),
            false,
            None,
        ),
        FriendKind::RandomUnitary { n, .. } => {
            // 4^n/9 − n/3 − 1/9 and 4^n/9 − 4n/3 − 1/9, over a common denominator
            let four_n = 4f64.powi(n as i32);
            let c_i = ((four_n - 3.0 * n as f64 - 1.0) / 9.0).max(0.0);
            let b = ((four_n - 12.0 * n as f64 - 1.0) / 9.0).max(0.0);
            BranchFactorReport {
                friend: Some(*kind),
                c_interference: Bounded::new(c_i, BoundFlag::LowerBound),
                c_distinguishability: Bounded::new(n as f64, BoundFlag::UpperBound),
                branch_factor: Bounded::new(b, BoundFlag::LowerBound),
                delta: 1.0,
                note: Some("holds with high probability over the Haar measure".into()),
            }
        }
        FriendKind::Dicke { n, k } => BranchFactorReport::from_parts(
            Some(*kind),
            Bounded::new((k * n) as f64, BoundFlag::Asymptotic),
            Bounded::new(1.0, BoundFlag::Asymptotic),
            true,
            Some("assumes the O(kn) preparation circuit is also a lower bound".into()),
        ),
    })
}

/// Two states made by random circuits of depths `d0` and `d1` on `n` qubits.
pub fn two_random_circuit_bounds(n: usize, d0: usize, d1: usize) -> Result<BranchFactorReport> {
    if n == 0 {
        return Err(Error::Domain(
            "two-random-circuit bounds need n >= 1".into(),
        ));
    }
    Ok(BranchFactorReport::from_parts(
        None,
        Bounded::new(((d0 + d1) * n) as f64, BoundFlag::Asymptotic),
        Bounded::new((d0.min(d1) * n) as f64, BoundFlag::Asymptotic),
        true,
        Some("unit constants".into()),
    ))
}

/// Largest register for [`ghz_complexities_by_search`].
pub const MAX_SEARCH_QUBITS: usize = 4;

fn search_gates(n: usize) -> Vec<Gate> {
    let mut gates = Vec::new();
    for q in 0..n {
        gates.extend([Gate::x(q), Gate::y(q), Gate::z(q), Gate::s(q)]);
    }
    let mut data = vec![C64::new(0.0, 0.0); 16];
    for (r, c) in [(0, 3), (3, 0), (1, 2), (2, 1)] {
        data[r * 4 + c] = C64::new(1.0, 0.0);
    }
    let xx = Matrix::new(4, data).expect("4x4");
    for a in 0..n {
        for b in a + 1..n {
            gates.push(Gate::dense("XX", vec![a, b], xx.clone()).expect("X⊗X is unitary"));
        }
    }
    gates
}

fn search<F: Fn(&StateVector, &StateVector) -> bool>(
    gates: &[Gate],
    u0: &StateVector,
    u1: &StateVector,
    budget: u32,
    accept: &F,
) -> bool {
    if accept(u0, u1) {
        return true;
    }
    for g in gates {
        let w = g.weight();
        if w > budget {
            continue;
        }
        let mut a = u0.clone();
        let mut b = u1.clone();
        a.apply(g).expect("in range");
        b.apply(g).expect("in range");
        if search(gates, &a, &b, budget - w, accept) {
            return true;
        }
    }
    false
}

fn minimum_weight<F: Fn(&StateVector, &StateVector) -> bool>(
    n: usize,
    max_weight: u32,
    accept: F,
) -> Result<Option<u32>> {
    let gates = search_gates(n);
    let psi0 = StateVector::zero(n)?;
    let psi1 = StateVector::basis(n, (1 << n) - 1)?;
    Ok((0..=max_weight).find(|&w| search(&gates, &psi0, &psi1, w, &accept)))
}

/// `C_I` and `C_D` of `|0^n⟩, |1^n⟩` at δ = 1, by exhaustive search over
/// circuits of single-qubit X, Y, Z, S (weight 1) and X⊗X (weight 2).
pub fn ghz_complexities_by_search(n: usize) -> Result<(u32, u32)> {
    if n == 0 || n > MAX_SEARCH_QUBITS {
        return Err(Error::Domain(format!(
            "exhaustive search supports 1..={MAX_SEARCH_QUBITS} qubits"
        )));
    }
    let tol = 1e-9;
    let zero = 0;
    let ones = (1usize << n) - 1;
    let c_i = minimum_weight(n, n as u32 + 1, |a, b| {
        // ⟨ψ1|U|ψ0⟩ + ⟨ψ0|U|ψ1⟩
        ((a.amplitude(ones) + b.amplitude(zero)).norm() / 2.0) >= 1.0 - tol
    })?;
    let c_d = minimum_weight(n, n as u32 + 1, |a, b| {
        ((a.amplitude(zero) - b.amplitude(ones)).norm() / 2.0) >= 1.0 - tol
    })?;
    match (c_i, c_d) {
        (Some(i), Some(d)) => Ok((i, d)),
        _ => Err(Error::Infeasible(
            "no circuit within the search budget".into(),
        )),
    }
}
