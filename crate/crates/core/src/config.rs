//! Experiment configuration and its flat `key = value` text form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ewfs::{FriendKind, MeasurementAngles};
use crate::infer::DecoderChoice;
use crate::lf::{optimal_angles, Inequality};
use crate::qsim::NoiseModel;

/// Default cap on total simulated qubits (2^24 amplitudes, 256 MiB).
pub const DEFAULT_MAX_QUBITS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact expectations of the (noisy) output state; readout noise ignored.
    Exact,
    /// Noiseless expectations rescaled by the global depolarizing survival product.
    AnalyticScaled,
    /// Shot sampling with decoders and readout noise.
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::AnalyticScaled => "analytic_scaled",
            Mode::Sampled => "sampled",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "exact" => Ok(Mode::Exact),
            "analytic_scaled" | "analytic" | "scaled" => Ok(Mode::AnalyticScaled),
            "sampled" | "sample" => Ok(Mode::Sampled),
            other => Err(Error::Config(format!("unknown mode '{other}'"))),
        }
    }
}

/// Where measurement angles come from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleChoice {
    /// The optimizer's maximizer for the configured inequality.
    Optimal,
    /// θ = (168°, 0°, 118°), β_z = 220° − θ_z.
    Historical,
    /// θ = (0°, 0°, 90°), β = (0°, 45°, 135°).
    Chsh,
    Explicit(MeasurementAngles),
}

impl AngleChoice {
    pub fn resolve(&self, inequality: Inequality) -> MeasurementAngles {
        match self {
            AngleChoice::Optimal => optimal_angles(inequality).0,
            AngleChoice::Historical => MeasurementAngles::historical(),
            AngleChoice::Chsh => MeasurementAngles::chsh(),
            AngleChoice::Explicit(a) => *a,
        }
    }
}

/// When a random-single decoder draws its bit position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionPolicy {
    #[default]
    PerShot,
    PerTrial,
}

/// How sampled mode obtains noisy outcomes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// Exact outcome distribution when one is cheaply available, else
    /// trajectories.
    #[default]
    Auto,
    /// Always run Pauli trajectories.
    Trajectory,
}

/// Which gates feed the valid-preparation estimate `q`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QScope {
    #[default]
    Preparation,
    WholeCircuit,
}

/// Shot and trial budget for one friend size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeBudget {
    pub size: usize,
    pub shots: usize,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EwfsConfig {
    pub friend_charlie: FriendKind,
    /// `None`: a single-qubit GHZ friend when Bob never peeks, otherwise a
    /// copy of Charlie's friend.
    pub friend_debbie: Option<FriendKind>,
    pub angles: AngleChoice,
    pub inequality: Inequality,
    pub mode: Mode,
    pub noise: NoiseModel,
    pub shots: usize,
    pub trials: usize,
    pub master_seed: u64,
    /// `None`: majority for GHZ, zero-vs-rest for random unitary, threshold
    /// for Dicke.
    pub decoder_peek: Option<DecoderChoice>,
    pub shots_per_trajectory: usize,
    pub sigmas: f64,
    pub max_qubits: usize,
    /// Draw a fresh random-unitary friend for every trial.
    pub resample_friend: bool,
    pub random_position: PositionPolicy,
    pub sampler: Sampler,
    pub q_scope: QScope,
    pub timing: bool,
    pub size_budgets: Vec<SizeBudget>,
}

impl Default for EwfsConfig {
    fn default() -> Self {
        Self {
            friend_charlie: FriendKind::Ghz { n: 3 },
            friend_debbie: None,
            angles: AngleChoice::Optimal,
            inequality: Inequality::SemiBrukner,
            mode: Mode::Sampled,
            noise: NoiseModel::noiseless(),
            shots: 10_000,
            trials: 10,
            master_seed: 1,
            decoder_peek: None,
            shots_per_trajectory: 1,
            sigmas: 3.0,
            max_qubits: DEFAULT_MAX_QUBITS,
            resample_friend: false,
            random_position: PositionPolicy::PerShot,
            sampler: Sampler::Auto,
            q_scope: QScope::Preparation,
            timing: false,
            size_budgets: Vec::new(),
        }
    }
}

pub fn default_decoder(kind: &FriendKind) -> DecoderChoice {
    match kind {
        FriendKind::Ghz { .. } => DecoderChoice::Majority,
        FriendKind::RandomUnitary { .. } => DecoderChoice::ZeroVsRest,
        FriendKind::Dicke { .. } => DecoderChoice::Threshold(None),
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!(
            "{key}: expected a boolean, got '{v}'"
        ))),
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

fn parse_triple(key: &str, v: &str) -> Result<[f64; 3]> {
    let parts: Vec<f64> = v
        .split(',')
        .map(|p| parse_num::<f64>(key, p))
        .collect::<Result<_>>()?;
    parts
        .try_into()
        .map_err(|_| Error::Config(format!("{key}: expected three comma-separated angles")))
}

impl EwfsConfig {
    pub fn new(friend: FriendKind, inequality: Inequality) -> Self {
        Self {
            friend_charlie: friend,
            inequality,
            ..Self::default()
        }
    }

    pub fn debbie(&self) -> FriendKind {
        self.friend_debbie.unwrap_or_else(|| {
            if self.inequality.spec().needs_bob_peek() {
                self.friend_charlie
            } else {
                FriendKind::Ghz { n: 1 }
            }
        })
    }

    pub fn resolved_angles(&self) -> MeasurementAngles {
        self.angles.resolve(self.inequality)
    }

    pub fn decoder_choice(&self) -> DecoderChoice {
        self.decoder_peek
            .unwrap_or_else(|| default_decoder(&self.friend_charlie))
    }

    /// Shots and trials after any per-size override for Charlie's friend.
    pub fn budget(&self) -> (usize, usize) {
        let n = self.friend_charlie.size();
        self.size_budgets
            .iter()
            .find(|b| b.size == n)
            .map_or((self.shots, self.trials), |b| (b.shots, b.trials))
    }

    pub fn total_qubits(&self) -> usize {
        2 + self.friend_charlie.size() + self.debbie().size()
    }

    /// Checks everything that can be checked without building circuits.
    pub fn validate(&self) -> Result<()> {
        for friend in [self.friend_charlie, self.debbie()] {
            if let FriendKind::RandomUnitary { n, .. } = friend {
                if n > crate::ewfs::MAX_DENSE_FRIEND_QUBITS {
                    return Err(Error::Infeasible(format!(
                        "random-unitary friend of {n} qubits exceeds {}",
                        crate::ewfs::MAX_DENSE_FRIEND_QUBITS
                    )));
                }
            }
            friend.validate()?;
        }
        if self.inequality == Inequality::SemiBrukner && self.debbie().size() != 1 {
            return Err(Error::Config(
                "semi_brukner uses a single-qubit Debbie register".into(),
            ));
        }
        if self.total_qubits() > self.max_qubits {
            return Err(Error::Infeasible(format!(
                "{} qubits exceeds the cap of {}",
                self.total_qubits(),
                self.max_qubits
            )));
        }
        let (shots, trials) = self.budget();
        if shots == 0 || trials == 0 || self.shots_per_trajectory == 0 {
            return Err(Error::Config(
                "shots, trials and shots_per_trajectory must be >= 1".into(),
            ));
        }
        if !(self.sigmas >= 0.0 && self.sigmas.is_finite()) {
            return Err(Error::Config(format!(
                "sigmas = {} must be >= 0",
                self.sigmas
            )));
        }
        self.decoder_choice().resolve(self.friend_charlie.size())?;
        if self.inequality.spec().needs_bob_peek() {
            self.decoder_choice().resolve(self.debbie().size())?;
        }
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        let v = value.trim();
        let noise = self.noise;
        match key.as_str() {
            "friend" | "friend_charlie" => self.friend_charlie = v.parse()?,
            "friend_debbie" => {
                self.friend_debbie = if v.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(v.parse()?)
                }
            }
            "angles" => {
                self.angles = match v.to_ascii_lowercase().as_str() {
                    "optimal" => AngleChoice::Optimal,
                    "historical" => AngleChoice::Historical,
                    "chsh" => AngleChoice::Chsh,
                    _ => {
                        let (t, b) = v.split_once(';').ok_or_else(|| {
                            Error::Config("angles: expected a preset or 't1,t2,t3;b1,b2,b3'".into())
                        })?;
                        AngleChoice::Explicit(MeasurementAngles::new(
                            parse_triple("angles", t)?,
                            parse_triple("angles", b)?,
                        )?)
                    }
                }
            }
            "theta" | "beta" => {
                let mut a = self.resolved_angles();
                if key == "theta" {
                    a.theta = parse_triple(&key, v)?;
                } else {
                    a.beta = parse_triple(&key, v)?;
                }
                self.angles = AngleChoice::Explicit(MeasurementAngles::new(a.theta, a.beta)?);
            }
            "inequality" => self.inequality = v.parse()?,
            "mode" => self.mode = v.parse()?,
            "p1" => {
                self.noise = NoiseModel::new(
                    parse_num(&key, v)?,
                    noise.p2(),
                    noise.p_readout(),
                    noise.scope(),
                )?
            }
            "p2" => {
                self.noise = NoiseModel::new(
                    noise.p1(),
                    parse_num(&key, v)?,
                    noise.p_readout(),
                    noise.scope(),
                )?
            }
            "p_readout" | "readout" => {
                self.noise =
                    NoiseModel::new(noise.p1(), noise.p2(), parse_num(&key, v)?, noise.scope())?
            }
            "depol_scope" | "scope" => {
                self.noise = NoiseModel::new(noise.p1(), noise.p2(), noise.p_readout(), v.parse()?)?
            }
            "shots" => self.shots = parse_num(&key, v)?,
            "trials" => self.trials = parse_num(&key, v)?,
            "seed" | "master_seed" => self.master_seed = parse_num(&key, v)?,
            "decoder" | "decoder_peek" => {
                self.decoder_peek = if v.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(v.parse()?)
                }
            }
            "shots_per_trajectory" => self.shots_per_trajectory = parse_num(&key, v)?,
            "sigmas" => self.sigmas = parse_num(&key, v)?,
            "max_qubits" => self.max_qubits = parse_num(&key, v)?,
            "resample_friend" => self.resample_friend = parse_bool(&key, v)?,
            "random_position" => {
                self.random_position = match v.to_ascii_lowercase().as_str() {
                    "shot" | "per_shot" => PositionPolicy::PerShot,
                    "trial" | "per_trial" => PositionPolicy::PerTrial,
                    _ => return Err(Error::Config(format!("random_position: '{v}'"))),
                }
            }
            "sampler" => {
                self.sampler = match v.to_ascii_lowercase().as_str() {
                    "auto" => Sampler::Auto,
                    "trajectory" | "trajectories" => Sampler::Trajectory,
                    _ => return Err(Error::Config(format!("sampler: '{v}'"))),
                }
            }
            "q_scope" => {
                self.q_scope = match v.to_ascii_lowercase().replace('-', "_").as_str() {
                    "preparation" | "prep" => QScope::Preparation,
                    "whole_circuit" | "circuit" => QScope::WholeCircuit,
                    _ => return Err(Error::Config(format!("q_scope: '{v}'"))),
                }
            }
            "timing" => self.timing = parse_bool(&key, v)?,
            "size_budget" | "size_budgets" => {
                self.size_budgets = v
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|item| {
                        let f: Vec<usize> = item
                            .split(':')
                            .map(|x| parse_num(&key, x))
                            .collect::<Result<_>>()?;
                        match f[..] {
                            [size, shots, trials] => Ok(SizeBudget {
                                size,
                                shots,
                                trials,
                            }),
                            _ => Err(Error::Config(format!(
                                "size_budget entry '{item}' is not size:shots:trials"
                            ))),
                        }
                    })
                    .collect::<Result<_>>()?
            }
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a `key=value` override as given on the command line.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{assignment}' lacks '='")))?;
        self.set(k, v)
    }

    /// Parses the text format: one `key = value` per line, `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            self.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Inverse of [`EwfsConfig::from_text`].
    pub fn to_text(&self) -> String {
        let a = self.angles;
        let angles = match a {
            AngleChoice::Optimal => "optimal".to_string(),
            AngleChoice::Historical => "historical".to_string(),
            AngleChoice::Chsh => "chsh".to_string(),
            AngleChoice::Explicit(m) => format!(
                "{},{},{};{},{},{}",
                m.theta[0], m.theta[1], m.theta[2], m.beta[0], m.beta[1], m.beta[2]
            ),
        };
        let budgets: Vec<String> = self
            .size_budgets
            .iter()
            .map(|b| format!("{}:{}:{}", b.size, b.shots, b.trials))
            .collect();
        let lines = [
            ("friend", self.friend_charlie.to_string()),
            (
                "friend_debbie",
                self.friend_debbie.map_or("auto".into(), |f| f.to_string()),
            ),
            ("angles", angles),
            ("inequality", self.inequality.to_string()),
            ("mode", self.mode.to_string()),
            ("p1", self.noise.p1().to_string()),
            ("p2", self.noise.p2().to_string()),
            ("p_readout", self.noise.p_readout().to_string()),
            ("depol_scope", self.noise.scope().to_string()),
            ("shots", self.shots.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.master_seed.to_string()),
            (
                "decoder",
                self.decoder_peek.map_or("auto".into(), |d| d.to_string()),
            ),
            (
                "shots_per_trajectory",
                self.shots_per_trajectory.to_string(),
            ),
            ("sigmas", self.sigmas.to_string()),
            ("max_qubits", self.max_qubits.to_string()),
            ("resample_friend", self.resample_friend.to_string()),
            (
                "random_position",
                match self.random_position {
                    PositionPolicy::PerShot => "shot",
                    PositionPolicy::PerTrial => "trial",
                }
                .into(),
            ),
            (
                "sampler",
                match self.sampler {
                    Sampler::Auto => "auto",
                    Sampler::Trajectory => "trajectory",
                }
                .into(),
            ),
            (
                "q_scope",
                match self.q_scope {
                    QScope::Preparation => "preparation",
                    QScope::WholeCircuit => "whole_circuit",
                }
                .into(),
            ),
            ("timing", self.timing.to_string()),
            ("size_budget", budgets.join(",")),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::DepolarizingScope;

    #[test]
    fn text_round_trip() {
        let text = "\
# noisy GHZ run
friend = ghz:5
inequality = semi_brukner
mode = sampled
p2 = 0.02   # two-qubit error
p1 = 0.002
p_readout = 0.01
depol_scope = local
shots = 2000
trials = 4
seed = 99
decoder = random
angles = 0,0,90;0,45,135
size_budget = 17:200:4
";
        let cfg = EwfsConfig::from_text(text).unwrap();
        assert_eq!(cfg.friend_charlie, FriendKind::Ghz { n: 5 });
        assert_eq!(cfg.noise.p2(), 0.02);
        assert_eq!(cfg.noise.scope(), DepolarizingScope::Local);
        assert_eq!(cfg.decoder_choice(), DecoderChoice::Random);
        assert_eq!(cfg.size_budgets.len(), 1);
        let again = EwfsConfig::from_text(&cfg.to_text()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn errors_name_the_line() {
        let err = EwfsConfig::from_text("shots = 10\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        assert_eq!(err.category(), "config");
        assert!(EwfsConfig::from_text("p1 = 1.5").is_err());
    }

    #[test]
    fn defaults_and_validation() {
        let cfg = EwfsConfig::default();
        assert_eq!(cfg.debbie(), FriendKind::Ghz { n: 1 });
        assert_eq!(cfg.decoder_choice(), DecoderChoice::Majority);
        cfg.validate().unwrap();

        let mut big = EwfsConfig::new(FriendKind::Ghz { n: 23 }, Inequality::SemiBrukner);
        assert_eq!(big.validate().unwrap_err().category(), "infeasible");
        big.max_qubits = 26;
        big.validate().unwrap();

        let g = EwfsConfig::new(FriendKind::Ghz { n: 3 }, Inequality::GenuineLf);
        assert_eq!(g.debbie(), FriendKind::Ghz { n: 3 });

        let mut s = EwfsConfig::default();
        s.friend_debbie = Some(FriendKind::Ghz { n: 3 });
        assert!(s.validate().is_err());

        let mut even = EwfsConfig::new(FriendKind::Ghz { n: 4 }, Inequality::SemiBrukner);
        assert!(even.validate().is_err());
        even.decoder_peek = Some(DecoderChoice::Random);
        even.validate().unwrap();
    }

    #[test]
    fn size_budget_override() {
        let mut cfg = EwfsConfig::new(FriendKind::Ghz { n: 17 }, Inequality::SemiBrukner);
        cfg.apply_override("size_budget=17:200:4,15:1000:10")
            .unwrap();
        assert_eq!(cfg.budget(), (200, 4));
        cfg.friend_charlie = FriendKind::Ghz { n: 3 };
        assert_eq!(cfg.budget(), (10_000, 10));
    }
}
