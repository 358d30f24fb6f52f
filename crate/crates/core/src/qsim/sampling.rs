use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::state::StateVector;
use crate::error::{check_probability, Error, Result};

/// Measured bits in little-endian order: bit `j` is the `j`-th measured
/// qubit. The text form lists bit 0 first (`"001"` has bit 2 set).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitString {
    bits: u64,
    len: usize,
}

impl BitString {
    pub fn new(bits: u64, len: usize) -> Self {
        debug_assert!(len <= 64);
        let mask = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        Self {
            bits: bits & mask,
            len,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(0, len)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, j: usize) -> bool {
        self.bits >> j & 1 == 1
    }

    pub fn hamming_weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn flip(&mut self, j: usize) {
        self.bits ^= 1 << j;
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            f.write_str(if self.bit(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > 64 {
            return Err(Error::Domain(format!("bitstring longer than 64: {s}")));
        }
        let mut bits = 0u64;
        for (j, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << j,
                _ => return Err(Error::Domain(format!("bad bit '{ch}' in {s}"))),
            }
        }
        Ok(BitString::new(bits, s.len()))
    }
}

/// Sampler over a fixed outcome distribution on `width` bits.
#[derive(Clone, Debug)]
pub struct OutcomeDistribution {
    width: usize,
    cdf: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn from_probabilities(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() || !probs.len().is_power_of_two() {
            return Err(Error::Domain(format!(
                "{} outcome probabilities is not a power of two",
                probs.len()
            )));
        }
        let mut acc = 0.0;
        let cdf: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p.max(0.0);
                acc
            })
            .collect();
        if !(acc > 0.0) {
            return Err(Error::Domain("distribution has zero mass".into()));
        }
        Ok(Self {
            width: probs.len().trailing_zeros() as usize,
            cdf,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn probability(&self, outcome: usize) -> f64 {
        let total = *self.cdf.last().unwrap();
        let lo = if outcome == 0 {
            0.0
        } else {
            self.cdf[outcome - 1]
        };
        (self.cdf[outcome] - lo) / total
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let total = *self.cdf.last().unwrap();
        let u = rng.random::<f64>() * total;
        let idx = self
            .cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1);
        BitString::new(idx as u64, self.width)
    }
}

/// Flips each bit independently with probability `p`.
pub fn apply_readout<R: Rng + ?Sized>(mut bits: BitString, p: f64, rng: &mut R) -> BitString {
    if p > 0.0 {
        for j in 0..bits.len() {
            if rng.random::<f64>() < p {
                bits.flip(j);
            }
        }
    }
    bits
}

/// One measurement of `measured` (computational basis) followed by
/// independent readout flips. Builds the marginal on every call; use
/// [`OutcomeDistribution`] directly for repeated shots.
pub fn sample_shot<R: Rng + ?Sized>(
    state: &StateVector,
    measured: &[usize],
    p_readout: f64,
    rng: &mut R,
) -> Result<BitString> {
    check_probability("p_readout", p_readout)?;
    let dist = OutcomeDistribution::from_probabilities(&state.marginal(measured)?)?;
    Ok(apply_readout(dist.sample(rng), p_readout, rng))
}
