//! Amplitude-slice kernels shared by the statevector and the vectorized
//! density matrix. Basis ordering is little-endian: qubit `q` is bit `q` of
//! the index.

use num_complex::Complex64 as C64;

use super::matrix::Matrix;

/// Spreads the bits of `i` over the positions not listed in `sorted_zero`,
/// leaving zeros at the listed positions.
#[inline]
pub(crate) fn insert_zero_bits(mut i: usize, sorted_zero: &[usize]) -> usize {
    for &pos in sorted_zero {
        let low = i & ((1usize << pos) - 1);
        i = ((i >> pos) << (pos + 1)) | low;
    }
    i
}

pub(crate) fn apply_1q(amps: &mut [C64], qubit: usize, m: [C64; 4]) {
    let bit = 1usize << qubit;
    let half = amps.len() >> 1;
    for i in 0..half {
        let i0 = insert_zero_bits(i, &[qubit]);
        let i1 = i0 | bit;
        let a0 = amps[i0];
        let a1 = amps[i1];
        amps[i0] = m[0] * a0 + m[1] * a1;
        amps[i1] = m[2] * a0 + m[3] * a1;
    }
}

pub(crate) fn apply_cnot(amps: &mut [C64], control: usize, target: usize) {
    let cbit = 1usize << control;
    let tbit = 1usize << target;
    let mut positions = [control, target];
    positions.sort_unstable();
    let quarter = amps.len() >> 2;
    for i in 0..quarter {
        let base = insert_zero_bits(i, &positions) | cbit;
        amps.swap(base, base | tbit);
    }
}

/// Applies `m` (dimension `2^qubits.len()`) to the listed qubits, optionally
/// only on the subspace where `control` is set. Row/column index bit `j` of
/// `m` corresponds to `qubits[j]`.
pub(crate) fn apply_dense(amps: &mut [C64], qubits: &[usize], control: Option<usize>, m: &Matrix) {
    let k = qubits.len();
    let d = 1usize << k;
    debug_assert_eq!(m.dim(), d);

    let offsets: Vec<usize> = (0..d)
        .map(|j| {
            qubits
                .iter()
                .enumerate()
                .filter(|(b, _)| j >> b & 1 == 1)
                .map(|(_, &q)| 1usize << q)
                .sum()
        })
        .collect();

    let mut fixed: Vec<usize> = qubits.to_vec();
    if let Some(c) = control {
        fixed.push(c);
    }
    fixed.sort_unstable();
    let cbit = control.map_or(0, |c| 1usize << c);

    let groups = amps.len() >> fixed.len();
    let mut buf = vec![C64::new(0.0, 0.0); d];
    let data = m.data();
    for g in 0..groups {
        let base = insert_zero_bits(g, &fixed) | cbit;
        for (slot, off) in buf.iter_mut().zip(&offsets) {
            *slot = amps[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let row = &data[r * d..(r + 1) * d];
            amps[base | off] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
        }
    }
}

/// Applies the Pauli string with the given X and Z support masks
/// (Y = both bits set). `Y = i·X·Z`, so `P|z⟩ = i^{#Y} (−1)^{|z ∧ zmask|} |z ⊕ xmask⟩`.
pub(crate) fn apply_pauli(amps: &mut [C64], x_mask: usize, z_mask: usize) {
    if x_mask == 0 && z_mask == 0 {
        return;
    }
    let y_count = (x_mask & z_mask).count_ones();
    let global = match y_count % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    };
    let phase = |z: usize| {
        if (z & z_mask).count_ones() % 2 == 1 {
            -global
        } else {
            global
        }
    };
    if x_mask == 0 {
        for (z, a) in amps.iter_mut().enumerate() {
            *a *= phase(z);
        }
        return;
    }
    for z in 0..amps.len() {
        let partner = z ^ x_mask;
        if z < partner {
            let az = amps[z];
            let ap = amps[partner];
            amps[partner] = phase(z) * az;
            amps[z] = phase(partner) * ap;
        }
    }
}
