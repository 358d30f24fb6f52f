//! Decoders that turn a measured friend bitstring into a ±1 outcome.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    /// `+1` iff bit `p` is 0.
    SignSingle(usize),
    /// [`DecoderKind::SignSingle`] at a uniformly drawn position.
    RandomSingle,
    /// `+1` iff Hamming weight `< n/2` (odd `n` only).
    MajorityVote,
    /// `+1` iff every bit is 0.
    ZeroVsRest,
    /// `+1` iff Hamming weight `< t`.
    HammingThreshold(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decoder {
    kind: DecoderKind,
    register_size: usize,
}

impl Decoder {
    pub fn new(kind: DecoderKind, register_size: usize) -> Result<Self> {
        if register_size == 0 || register_size > 32 {
            return Err(Error::InvalidDecoder(format!(
                "register size {register_size} outside 1..=32"
            )));
        }
        match kind {
            DecoderKind::SignSingle(p) if p >= register_size => {
                return Err(Error::InvalidDecoder(format!(
                    "position {p} outside {register_size}-bit register"
                )))
            }
            DecoderKind::MajorityVote if register_size.is_multiple_of(2) => {
                return Err(Error::InvalidDecoder(format!(
                    "majority vote needs an odd register, got {register_size}"
                )))
            }
            DecoderKind::HammingThreshold(t) if t == 0 || t > register_size => {
                return Err(Error::InvalidDecoder(format!(
                    "threshold {t} outside 1..={register_size}"
                )))
            }
            _ => {}
        }
        Ok(Self {
            kind,
            register_size,
        })
    }

    /// Single-bit sign decoder on a one-qubit register.
    pub fn sign() -> Self {
        Self {
            kind: DecoderKind::SignSingle(0),
            register_size: 1,
        }
    }

    /// Hamming threshold at `ceil(n/3)`.
    pub fn default_threshold(register_size: usize) -> Result<Self> {
        Self::new(
            DecoderKind::HammingThreshold(register_size.div_ceil(3)),
            register_size,
        )
    }

    pub fn kind(&self) -> DecoderKind {
        self.kind
    }

    pub fn register_size(&self) -> usize {
        self.register_size
    }

    pub fn is_deterministic(&self) -> bool {
        self.kind != DecoderKind::RandomSingle
    }

    /// Value of a deterministic decoder on the raw bits; `None` for
    /// [`DecoderKind::RandomSingle`].
    #[inline]
    pub fn value(&self, bits: u64) -> Option<i8> {
        let n = self.register_size as u32;
        let w = bits.count_ones();
        let plus = match self.kind {
            DecoderKind::SignSingle(p) => bits >> p & 1 == 0,
            DecoderKind::RandomSingle => return None,
            DecoderKind::MajorityVote => 2 * w < n,
            DecoderKind::ZeroVsRest => bits == 0,
            DecoderKind::HammingThreshold(t) => (w as usize) < t,
        };
        Some(if plus { 1 } else { -1 })
    }

    pub fn decode<R: Rng + ?Sized>(&self, bits: BitString, rng: &mut R) -> Result<i8> {
        if bits.len() != self.register_size {
            return Err(Error::InvalidDecoder(format!(
                "bitstring of length {} for {}-bit decoder",
                bits.len(),
                self.register_size
            )));
        }
        Ok(match self.value(bits.bits()) {
            Some(v) => v,
            None => {
                let p = rng.random_range(0..self.register_size);
                if bits.bit(p) {
                    -1
                } else {
                    1
                }
            }
        })
    }

    /// Diagonal ±1 valuation over all `2^n` basis states of the register.
    pub fn diagonal(&self) -> Result<Vec<i8>> {
        if !self.is_deterministic() {
            return Err(Error::InvalidDecoder(
                "random single-bit decoder has no fixed diagonal form".into(),
            ));
        }
        Ok((0..1u64 << self.register_size)
            .map(|z| self.value(z).unwrap())
            .collect())
    }

    pub fn is_traceless(&self) -> Result<bool> {
        Ok(self.diagonal()?.iter().map(|&v| v as i64).sum::<i64>() == 0)
    }
}

/// Decoder family without a register size, as chosen in configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderChoice {
    Majority,
    Random,
    Sign(usize),
    ZeroVsRest,
    /// `None` means `ceil(n/3)`.
    Threshold(Option<usize>),
}

impl DecoderChoice {
    pub fn resolve(self, register_size: usize) -> Result<Decoder> {
        let kind = match self {
            DecoderChoice::Majority => DecoderKind::MajorityVote,
            DecoderChoice::Random => DecoderKind::RandomSingle,
            DecoderChoice::Sign(p) => DecoderKind::SignSingle(p),
            DecoderChoice::ZeroVsRest => DecoderKind::ZeroVsRest,
            DecoderChoice::Threshold(t) => {
                DecoderKind::HammingThreshold(t.unwrap_or(register_size.div_ceil(3)))
            }
        };
        Decoder::new(kind, register_size)
    }
}

impl fmt::Display for DecoderChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecoderChoice::Majority => f.write_str("majority"),
            DecoderChoice::Random => f.write_str("random"),
            DecoderChoice::Sign(p) => write!(f, "sign:{p}"),
            DecoderChoice::ZeroVsRest => f.write_str("zero_vs_rest"),
            DecoderChoice::Threshold(None) => f.write_str("threshold"),
            DecoderChoice::Threshold(Some(t)) => write!(f, "threshold:{t}"),
        }
    }
}

impl FromStr for DecoderChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s.as_str(), None),
        };
        let num = |a: Option<&str>| -> Result<Option<usize>> {
            a.map(|v| {
                v.parse()
                    .map_err(|_| Error::Config(format!("bad decoder argument '{v}'")))
            })
            .transpose()
        };
        match head {
            "majority" | "majority_vote" => Ok(Self::Majority),
            "random" | "random_single" => Ok(Self::Random),
            "sign" | "sign_single" => Ok(Self::Sign(num(arg)?.unwrap_or(0))),
            "zero_vs_rest" | "zero" => Ok(Self::ZeroVsRest),
            "threshold" | "hamming" | "hamming_threshold" => Ok(Self::Threshold(num(arg)?)),
            other => Err(Error::Config(format!("unknown decoder '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::RngStream;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn majority_vote_examples() {
        let d = Decoder::new(DecoderKind::MajorityVote, 5).unwrap();
        let mut rng = RngStream::new(0, 0).rng();
        assert_eq!(d.decode(bits("00100"), &mut rng).unwrap(), 1);
        assert_eq!(d.decode(bits("10101"), &mut rng).unwrap(), -1);
        assert!(Decoder::new(DecoderKind::MajorityVote, 4).is_err());
    }

    #[test]
    fn zero_vs_rest_examples() {
        let d = Decoder::new(DecoderKind::ZeroVsRest, 3).unwrap();
        let mut rng = RngStream::new(0, 0).rng();
        assert_eq!(d.decode(bits("000"), &mut rng).unwrap(), 1);
        assert_eq!(d.decode(bits("001"), &mut rng).unwrap(), -1);
        let d2 = Decoder::new(DecoderKind::ZeroVsRest, 2).unwrap();
        let sum: i32 = d2.diagonal().unwrap().iter().map(|&v| v as i32).sum();
        assert_eq!(sum, -2);
        assert!(!d2.is_traceless().unwrap());
    }

    #[test]
    fn threshold_examples() {
        let d = Decoder::default_threshold(9).unwrap();
        assert_eq!(d.kind(), DecoderKind::HammingThreshold(3));
        let mut rng = RngStream::new(0, 0).rng();
        assert_eq!(d.decode(bits("110000000"), &mut rng).unwrap(), 1);
        assert_eq!(d.decode(bits("110000100"), &mut rng).unwrap(), -1);
        assert!(Decoder::new(DecoderKind::HammingThreshold(0), 3).is_err());
        assert!(Decoder::new(DecoderKind::HammingThreshold(4), 3).is_err());
    }

    #[test]
    fn majority_diagonal_n3() {
        let d = Decoder::new(DecoderKind::MajorityVote, 3).unwrap();
        let v = d.diagonal().unwrap();
        let plus: Vec<usize> = (0..8).filter(|&z| v[z] == 1).collect();
        assert_eq!(plus, vec![0b000, 0b001, 0b010, 0b100]);
        assert!(d.is_traceless().unwrap());
    }

    #[test]
    fn length_mismatch_and_random_diagonal() {
        let d = Decoder::new(DecoderKind::RandomSingle, 3).unwrap();
        let mut rng = RngStream::new(0, 0).rng();
        assert!(d.decode(bits("00"), &mut rng).is_err());
        assert!(d.diagonal().is_err());
        assert!(Decoder::new(DecoderKind::SignSingle(3), 3).is_err());
    }

    #[test]
    fn agree_on_ghz_branches() {
        let mut rng = RngStream::new(5, 0).rng();
        for n in [1usize, 3, 5, 7] {
            let all = BitString::new((1u64 << n) - 1, n);
            let none = BitString::zeros(n);
            let decoders = [
                Decoder::new(DecoderKind::MajorityVote, n).unwrap(),
                Decoder::new(DecoderKind::RandomSingle, n).unwrap(),
                Decoder::new(DecoderKind::SignSingle(n - 1), n).unwrap(),
            ];
            for d in decoders {
                for _ in 0..20 {
                    assert_eq!(d.decode(none, &mut rng).unwrap(), 1);
                    assert_eq!(d.decode(all, &mut rng).unwrap(), -1);
                }
            }
        }
    }

    #[test]
    fn diagonal_consistent_with_decode() {
        let mut rng = RngStream::new(0, 0).rng();
        for kind in [
            DecoderKind::MajorityVote,
            DecoderKind::ZeroVsRest,
            DecoderKind::HammingThreshold(2),
            DecoderKind::SignSingle(1),
        ] {
            let d = Decoder::new(kind, 5).unwrap();
            let diag = d.diagonal().unwrap();
            for z in 0..32u64 {
                assert_eq!(
                    diag[z as usize],
                    d.decode(BitString::new(z, 5), &mut rng).unwrap()
                );
            }
        }
    }

    #[test]
    fn choice_parsing() {
        assert_eq!(
            "majority".parse::<DecoderChoice>().unwrap(),
            DecoderChoice::Majority
        );
        assert_eq!(
            "sign:2".parse::<DecoderChoice>().unwrap(),
            DecoderChoice::Sign(2)
        );
        assert_eq!(
            "threshold:4".parse::<DecoderChoice>().unwrap(),
            DecoderChoice::Threshold(Some(4))
        );
        assert!("vote".parse::<DecoderChoice>().is_err());
        for c in [
            DecoderChoice::Random,
            DecoderChoice::ZeroVsRest,
            DecoderChoice::Threshold(None),
        ] {
            assert_eq!(c.to_string().parse::<DecoderChoice>().unwrap(), c);
        }
    }
}
