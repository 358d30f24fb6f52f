//! Extended Wigner's Friend circuits: a singlet shared by two friends, each
//! friend "measuring" its half with a controlled unitary into a register,
//! and two outer observers who either peek at the register or undo the
//! measurement and measure the system in a rotated basis.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{Circuit, Gate, Matrix, RngStream, SingleOp, StateVector};

/// Largest register for which a dense friend unitary is built.
pub const MAX_DENSE_FRIEND_QUBITS: usize = 12;
/// Largest register for [`dicke_state`].
pub const MAX_DICKE_QUBITS: usize = 20;

/// The friend's measurement apparatus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FriendKind {
    /// CNOT ladder into `n` qubits; the branches are `|0^n⟩` and `|1^n⟩`.
    Ghz { n: usize },
    /// Controlled Haar-random `U`; the branches are `|0^n⟩` and `U|0^n⟩`.
    RandomUnitary { n: usize, seed: u64 },
    /// Controlled Dicke preparation; the branches are `|0^n⟩` and `D(n,k)`.
    Dicke { n: usize, k: usize },
}

impl FriendKind {
    pub fn size(&self) -> usize {
        match *self {
            FriendKind::Ghz { n }
            | FriendKind::RandomUnitary { n, .. }
            | FriendKind::Dicke { n, .. } => n,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            FriendKind::Ghz { .. } => "ghz",
            FriendKind::RandomUnitary { .. } => "random_unitary",
            FriendKind::Dicke { .. } => "dicke",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FriendKind::Ghz { n } if n == 0 || n > crate::qsim::MAX_QUBITS => {
                Err(Error::InvalidFriend(format!("GHZ friend size {n}")))
            }
            FriendKind::RandomUnitary { n, .. } if n == 0 || n > MAX_DENSE_FRIEND_QUBITS => {
                Err(Error::InvalidFriend(format!(
                    "random-unitary friend size {n} outside 1..={MAX_DENSE_FRIEND_QUBITS}"
                )))
            }
            FriendKind::Dicke { n, k } if k == 0 || k >= n => Err(Error::InvalidFriend(format!(
                "Dicke weight {k} must satisfy 1 <= k < n = {n}"
            ))),
            FriendKind::Dicke { n, .. } if n > MAX_DENSE_FRIEND_QUBITS => {
                Err(Error::InvalidFriend(format!(
                    "Dicke friend size {n} exceeds {MAX_DENSE_FRIEND_QUBITS}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Same family with a fresh random seed (only random-unitary friends change).
    pub fn reseeded(self, seed: u64) -> Self {
        match self {
            FriendKind::RandomUnitary { n, .. } => FriendKind::RandomUnitary { n, seed },
            other => other,
        }
    }
}

impl fmt::Display for FriendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FriendKind::Ghz { n } => write!(f, "ghz:{n}"),
            FriendKind::RandomUnitary { n, seed } => write!(f, "random_unitary:{n}:{seed}"),
            FriendKind::Dicke { n, k } => write!(f, "dicke:{n}:{k}"),
        }
    }
}

impl FromStr for FriendKind {
    type Err = Error;

    /// `ghz:N`, `random_unitary:N[:SEED]`, `dicke:N[:K]` (K defaults to N/2).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<Option<u64>> {
            parts
                .get(i)
                .map(|v| {
                    v.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Config(format!("bad number '{v}' in friend '{s}'")))
                })
                .transpose()
        };
        let n = num(1)?.ok_or_else(|| Error::Config(format!("friend '{s}' is missing a size")))?
            as usize;
        let kind = match parts[0].trim().to_ascii_lowercase().as_str() {
            "ghz" => FriendKind::Ghz { n },
            "random_unitary" | "ru" | "haar" => FriendKind::RandomUnitary {
                n,
                seed: num(2)?.unwrap_or(0),
            },
            "dicke" => FriendKind::Dicke {
                n,
                k: num(2)?.map(|k| k as usize).unwrap_or(n / 2),
            },
            other => return Err(Error::Config(format!("unknown friend family '{other}'"))),
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// Observer settings; index 1 is PEEK, 2 and 3 are the two REVERSE settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Setting {
    Peek,
    Reverse1,
    Reverse2,
}

impl Setting {
    pub const ALL: [Setting; 3] = [Setting::Peek, Setting::Reverse1, Setting::Reverse2];

    /// 1-based label.
    pub fn index(self) -> usize {
        match self {
            Setting::Peek => 1,
            Setting::Reverse1 => 2,
            Setting::Reverse2 => 3,
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Setting::Peek),
            2 => Ok(Setting::Reverse1),
            3 => Ok(Setting::Reverse2),
            _ => Err(Error::InvalidSetting(format!("setting index {i}"))),
        }
    }
}

fn reduce_degrees(a: f64) -> f64 {
    let r = a.rem_euclid(360.0);
    if r == 360.0 {
        0.0
    } else {
        r
    }
}

/// Six free measurement angles in degrees: `theta` for Alice, `beta` for Bob,
/// indexed by setting (entry 0 ↔ setting 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementAngles {
    pub theta: [f64; 3],
    pub beta: [f64; 3],
}

impl MeasurementAngles {
    pub fn new(theta: [f64; 3], beta: [f64; 3]) -> Result<Self> {
        if theta.iter().chain(&beta).any(|a| !a.is_finite()) {
            return Err(Error::Domain("measurement angles must be finite".into()));
        }
        Ok(Self {
            theta: theta.map(reduce_degrees),
            beta: beta.map(reduce_degrees),
        })
    }

    pub fn from_radians(theta: [f64; 3], beta: [f64; 3]) -> Result<Self> {
        Self::new(theta.map(f64::to_degrees), beta.map(f64::to_degrees))
    }

    /// Bob's angles derived as `β_z = offset − θ_z`.
    pub fn with_offset(theta: [f64; 3], offset: f64) -> Result<Self> {
        Self::new(theta, theta.map(|t| offset - t))
    }

    /// The historical photonic-experiment assignment: θ = (168°, 0°, 118°),
    /// β_z = 220° − θ_z.
    pub fn historical() -> Self {
        Self::with_offset([168.0, 0.0, 118.0], 220.0).expect("finite")
    }

    /// A closed-form maximizer for the four-term CHSH-type forms
    /// (θ = 0°, ·, 90°; β = ·, 45°, 135°).
    pub fn chsh() -> Self {
        Self::new([0.0, 0.0, 90.0], [0.0, 45.0, 135.0]).expect("finite")
    }

    pub fn theta_rad(&self, setting: Setting) -> f64 {
        self.theta[setting.index() - 1].to_radians()
    }

    pub fn beta_rad(&self, setting: Setting) -> f64 {
        self.beta[setting.index() - 1].to_radians()
    }

    pub fn shifted(&self, delta: f64) -> Result<Self> {
        Self::new(self.theta.map(|t| t + delta), self.beta.map(|b| b + delta))
    }
}

/// `M(θ)`: after it, a computational-basis measurement realizes `O_θ`.
pub fn basis_change_gate(theta_deg: f64, qubit: usize) -> Gate {
    Gate::single(SingleOp::Basis(theta_deg.to_radians()), qubit)
}

/// Prepares `(|10⟩ − |01⟩)/√2` in `|s_d s_c⟩` order, i.e. amplitudes
/// `[0, 1/√2, −1/√2, 0]` when `s_c = 0, s_d = 1`: the singlet.
pub fn singlet_prep(s_c: usize, s_d: usize) -> Result<Vec<Gate>> {
    Ok(vec![
        Gate::x(s_c),
        Gate::x(s_d),
        Gate::h(s_d),
        Gate::cnot(s_d, s_c)?,
    ])
}

/// `n`-qubit Haar-random unitary from the QR decomposition of a complex
/// Ginibre matrix, with `R`'s diagonal fixed positive. Deterministic in `seed`.
pub fn haar_unitary(n: usize, seed: u64) -> Result<Matrix> {
    if n == 0 || n > MAX_DENSE_FRIEND_QUBITS {
        return Err(Error::InvalidFriend(format!(
            "Haar unitary on {n} qubits (limit {MAX_DENSE_FRIEND_QUBITS})"
        )));
    }
    let d = 1usize << n;
    let mut rng = RngStream::new(seed, 0x4a41_5252).rng();
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    // columns of the Ginibre matrix
    let mut cols: Vec<Vec<C64>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();

    // Modified Gram–Schmidt, two passes. Q's columns keep the phase of the
    // raw columns, which is the positive-diagonal-R convention.
    for j in 0..d {
        let (done, rest) = cols.split_at_mut(j);
        let v = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let proj: C64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi /= norm;
        }
    }

    let mut data = vec![C64::new(0.0, 0.0); d * d];
    for (c, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            data[r * d + c] = *z;
        }
    }
    Matrix::new(d, data)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_dicke(n: usize, k: usize, cap: usize) -> Result<()> {
    if n == 0 || n > cap || k == 0 || k >= n {
        return Err(Error::InvalidFriend(format!(
            "Dicke state D({n},{k}) needs 1 <= k < n <= {cap}"
        )));
    }
    Ok(())
}

fn dicke_amplitudes(n: usize, k: usize) -> Vec<f64> {
    let amp = binomial(n, k).sqrt().recip();
    (0..1u64 << n)
        .map(|z| {
            if z.count_ones() as usize == k {
                amp
            } else {
                0.0
            }
        })
        .collect()
}

/// Equal superposition of the weight-`k` basis strings on `n` qubits.
pub fn dicke_state(n: usize, k: usize) -> Result<StateVector> {
    check_dicke(n, k, MAX_DICKE_QUBITS)?;
    StateVector::from_amplitudes(
        dicke_amplitudes(n, k)
            .into_iter()
            .map(|a| C64::new(a, 0.0))
            .collect(),
    )
}

/// Householder reflection `I − w wᵀ`, `w = e₀ − |D(n,k)⟩`, whose first
/// column is the Dicke state.
pub fn dicke_unitary(n: usize, k: usize) -> Result<Matrix> {
    check_dicke(n, k, MAX_DENSE_FRIEND_QUBITS)?;
    let mut w = dicke_amplitudes(n, k);
    for x in w.iter_mut() {
        *x = -*x;
    }
    w[0] += 1.0;
    let d = w.len();
    let mut data = vec![C64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            let id = if r == c { 1.0 } else { 0.0 };
            data[r * d + c] = C64::new(id - w[r] * w[c], 0.0);
        }
    }
    Matrix::new(d, data)
}

/// Gates of the friend's measurement: controlled from `system` into `register`.
pub fn friend_unitary(kind: &FriendKind, system: usize, register: &[usize]) -> Result<Vec<Gate>> {
    kind.validate()?;
    if register.len() != kind.size() {
        return Err(Error::InvalidFriend(format!(
            "{} friend on a {}-qubit register",
            kind,
            register.len()
        )));
    }
    match *kind {
        FriendKind::Ghz { .. } => {
            let mut gates = vec![Gate::cnot(system, register[0])?];
            for w in register.windows(2) {
                gates.push(Gate::cnot(w[0], w[1])?);
            }
            Ok(gates)
        }
        FriendKind::RandomUnitary { n, seed } => Ok(vec![Gate::controlled(
            format!("Haar{n}#{seed}"),
            system,
            register.to_vec(),
            haar_unitary(n, seed)?,
        )?]),
        FriendKind::Dicke { n, k } => Ok(vec![Gate::controlled(
            format!("Dicke({n},{k})"),
            system,
            register.to_vec(),
            dicke_unitary(n, k)?,
        )?]),
    }
}

/// Qubit roles of an EWFS circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitLayout {
    pub s_c: usize,
    pub s_d: usize,
    pub charlie: Vec<usize>,
    pub debbie: Vec<usize>,
}

impl QubitLayout {
    pub fn new(charlie_size: usize, debbie_size: usize) -> Self {
        Self {
            s_c: 0,
            s_d: 1,
            charlie: (2..2 + charlie_size).collect(),
            debbie: (2 + charlie_size..2 + charlie_size + debbie_size).collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        2 + self.charlie.len() + self.debbie.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentRole {
    SingletPrep,
    FriendBasis,
    CharlieMeasurement,
    DebbieMeasurement,
    AliceSetting,
    BobSetting,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub role: SegmentRole,
    pub gates: Range<usize>,
}

#[derive(Clone, Debug)]
pub struct EwfsCircuit {
    pub circuit: Circuit,
    pub alice_measured: Vec<usize>,
    pub bob_measured: Vec<usize>,
    pub layout: QubitLayout,
    pub segments: Vec<Segment>,
    pub settings: (Setting, Setting),
}

impl EwfsCircuit {
    /// Gates of the segments with the given roles, in circuit order.
    pub fn segment_gates(&self, roles: &[SegmentRole]) -> Vec<Gate> {
        self.segments
            .iter()
            .filter(|s| roles.contains(&s.role))
            .flat_map(|s| self.circuit.gates()[s.gates.clone()].iter().cloned())
            .collect()
    }

    /// Everything up to and including both friends' measurements.
    pub fn friend_preparation(&self) -> Circuit {
        let mut c = Circuit::new(self.circuit.num_qubits());
        c.extend(self.segment_gates(&[
            SegmentRole::SingletPrep,
            SegmentRole::FriendBasis,
            SegmentRole::CharlieMeasurement,
            SegmentRole::DebbieMeasurement,
        ]))
        .expect("gates already validated");
        c
    }
}

/// Builds EWFS circuits for any setting pair, computing each friend's
/// unitary once.
#[derive(Clone, Debug)]
pub struct EwfsBuilder {
    charlie: FriendKind,
    debbie: FriendKind,
    angles: MeasurementAngles,
    layout: QubitLayout,
    charlie_gates: Arc<Vec<Gate>>,
    debbie_gates: Arc<Vec<Gate>>,
}

impl EwfsBuilder {
    pub fn new(charlie: FriendKind, debbie: FriendKind, angles: MeasurementAngles) -> Result<Self> {
        let layout = QubitLayout::new(charlie.size(), debbie.size());
        let charlie_gates = friend_unitary(&charlie, layout.s_c, &layout.charlie)?;
        let debbie_gates = friend_unitary(&debbie, layout.s_d, &layout.debbie)?;
        Ok(Self {
            charlie,
            debbie,
            angles,
            layout,
            charlie_gates: Arc::new(charlie_gates),
            debbie_gates: Arc::new(debbie_gates),
        })
    }

    pub fn layout(&self) -> &QubitLayout {
        &self.layout
    }

    pub fn charlie(&self) -> FriendKind {
        self.charlie
    }

    pub fn debbie(&self) -> FriendKind {
        self.debbie
    }

    pub fn angles(&self) -> MeasurementAngles {
        self.angles
    }

    pub fn circuit(&self, x: Setting, y: Setting) -> Result<EwfsCircuit> {
        let layout = self.layout.clone();
        let mut circuit = Circuit::new(layout.num_qubits());
        let mut segments = Vec::new();
        let mut section =
            |circuit: &mut Circuit, role: SegmentRole, gates: Vec<Gate>| -> Result<()> {
                let start = circuit.len();
                circuit.extend(gates)?;
                segments.push(Segment {
                    role,
                    gates: start..circuit.len(),
                });
                Ok(())
            };

        let (s_c, s_d) = (layout.s_c, layout.s_d);
        let a = &self.angles;
        section(
            &mut circuit,
            SegmentRole::SingletPrep,
            singlet_prep(s_c, s_d)?,
        )?;
        section(
            &mut circuit,
            SegmentRole::FriendBasis,
            vec![
                basis_change_gate(a.theta[0], s_c),
                basis_change_gate(a.beta[0], s_d),
            ],
        )?;
        section(
            &mut circuit,
            SegmentRole::CharlieMeasurement,
            self.charlie_gates.to_vec(),
        )?;
        section(
            &mut circuit,
            SegmentRole::DebbieMeasurement,
            self.debbie_gates.to_vec(),
        )?;

        let reverse = |friend: &[Gate], system: usize, first: f64, chosen: f64| -> Vec<Gate> {
            friend
                .iter()
                .rev()
                .map(Gate::inverse)
                .chain([
                    basis_change_gate(first, system).inverse(),
                    basis_change_gate(chosen, system),
                ])
                .collect()
        };

        let alice_measured = match x {
            Setting::Peek => layout.charlie.clone(),
            other => {
                let g = reverse(
                    &self.charlie_gates,
                    s_c,
                    a.theta[0],
                    a.theta[other.index() - 1],
                );
                section(&mut circuit, SegmentRole::AliceSetting, g)?;
                vec![s_c]
            }
        };
        let bob_measured = match y {
            Setting::Peek => {
                if layout.debbie.is_empty() {
                    return Err(Error::InvalidSetting(
                        "Bob cannot peek without a Debbie register".into(),
                    ));
                }
                layout.debbie.clone()
            }
            other => {
                let g = reverse(
                    &self.debbie_gates,
                    s_d,
                    a.beta[0],
                    a.beta[other.index() - 1],
                );
                section(&mut circuit, SegmentRole::BobSetting, g)?;
                vec![s_d]
            }
        };

        Ok(EwfsCircuit {
            circuit,
            alice_measured,
            bob_measured,
            layout,
            segments,
            settings: (x, y),
        })
    }
}

/// One-shot convenience over [`EwfsBuilder`].
pub fn build_ewfs_circuit(
    charlie: FriendKind,
    debbie: FriendKind,
    angles: MeasurementAngles,
    x: Setting,
    y: Setting,
) -> Result<EwfsCircuit> {
    EwfsBuilder::new(charlie, debbie, angles)?.circuit(x, y)
}
