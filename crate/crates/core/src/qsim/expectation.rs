use super::state::{extract_bits, StateVector};
use crate::error::{Error, Result};
use crate::infer::Decoder;

fn check_pair(
    num_qubits: usize,
    decoder_a: &Decoder,
    qubits_a: &[usize],
    decoder_b: &Decoder,
    qubits_b: &[usize],
) -> Result<()> {
    for (d, q) in [(decoder_a, qubits_a), (decoder_b, qubits_b)] {
        if d.register_size() != q.len() {
            return Err(Error::InvalidDecoder(format!(
                "{}-bit decoder on {} qubits",
                d.register_size(),
                q.len()
            )));
        }
        if let Some(&index) = q.iter().find(|&&i| i >= num_qubits) {
            return Err(Error::QubitOutOfRange { index, num_qubits });
        }
    }
    let mut all: Vec<usize> = qubits_a.iter().chain(qubits_b).copied().collect();
    all.sort_unstable();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::OverlappingQubits(
            qubits_a.iter().chain(qubits_b).copied().collect(),
        ));
    }
    Ok(())
}

/// `Σ_z p(z)·a(z|qubits_a)·b(z|qubits_b)` over a full computational-basis
/// distribution `probs`.
pub fn pair_expectation_from_probabilities(
    probs: &[f64],
    decoder_a: &Decoder,
    qubits_a: &[usize],
    decoder_b: &Decoder,
    qubits_b: &[usize],
) -> Result<f64> {
    let n = probs.len().trailing_zeros() as usize;
    check_pair(n, decoder_a, qubits_a, decoder_b, qubits_b)?;
    let va = decoder_a.diagonal()?;
    let vb = decoder_b.diagonal()?;
    let mut acc = 0.0;
    for (z, &p) in probs.iter().enumerate() {
        if p != 0.0 {
            let a = va[extract_bits(z, qubits_a)] as f64;
            let b = vb[extract_bits(z, qubits_b)] as f64;
            acc += p * a * b;
        }
    }
    Ok(acc)
}

/// Exact `⟨A⊗B⟩` of two diagonal decoders on disjoint qubit sets; no sampling.
pub fn exact_pair_expectation(
    state: &StateVector,
    decoder_a: &Decoder,
    qubits_a: &[usize],
    decoder_b: &Decoder,
    qubits_b: &[usize],
) -> Result<f64> {
    pair_expectation_from_probabilities(
        &state.probabilities(),
        decoder_a,
        qubits_a,
        decoder_b,
        qubits_b,
    )
}

/// Exact `⟨A⟩` of one diagonal decoder.
pub fn single_expectation_from_probabilities(
    probs: &[f64],
    decoder: &Decoder,
    qubits: &[usize],
) -> Result<f64> {
    let n = probs.len().trailing_zeros() as usize;
    if decoder.register_size() != qubits.len() {
        return Err(Error::InvalidDecoder(format!(
            "{}-bit decoder on {} qubits",
            decoder.register_size(),
            qubits.len()
        )));
    }
    if let Some(&index) = qubits.iter().find(|&&i| i >= n) {
        return Err(Error::QubitOutOfRange {
            index,
            num_qubits: n,
        });
    }
    let v = decoder.diagonal()?;
    Ok(probs
        .iter()
        .enumerate()
        .map(|(z, p)| p * v[extract_bits(z, qubits)] as f64)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infer::DecoderKind;
    use crate::qsim::Gate;

    fn singlet() -> StateVector {
        let mut s = StateVector::zero(2).unwrap();
        for g in [
            Gate::x(0),
            Gate::x(1),
            Gate::h(1),
            Gate::cnot(1, 0).unwrap(),
        ] {
            s.apply(&g).unwrap();
        }
        s
    }

    #[test]
    fn singlet_anticorrelated() {
        let d = Decoder::sign();
        let e = exact_pair_expectation(&singlet(), &d, &[0], &d, &[1]).unwrap();
        assert!((e + 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_zero_state() {
        let d = Decoder::sign();
        let s = StateVector::zero(2).unwrap();
        assert!((exact_pair_expectation(&s, &d, &[0], &d, &[1]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_rejected() {
        let d = Decoder::sign();
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(
            exact_pair_expectation(&s, &d, &[0], &d, &[0]),
            Err(Error::OverlappingQubits(_))
        ));
        let maj = Decoder::new(DecoderKind::MajorityVote, 3).unwrap();
        assert!(exact_pair_expectation(&s, &maj, &[0], &d, &[1]).is_err());
    }

    #[test]
    fn single_expectation_of_basis_state() {
        let s = StateVector::basis(3, 0b101).unwrap();
        let maj = Decoder::new(DecoderKind::MajorityVote, 3).unwrap();
        let v =
            single_expectation_from_probabilities(&s.probabilities(), &maj, &[0, 1, 2]).unwrap();
        assert_eq!(v, -1.0);
    }
}
