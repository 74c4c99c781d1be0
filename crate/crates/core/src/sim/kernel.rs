//! Low-level amplitude kernels shared by the statevector and density-matrix paths.
//!
//! A density matrix of `n` qubits is stored row-major, which makes it a vector over
//! `2n` "qubits": bits `0..n` index the column and bits `n..2n` the row. Left
//! multiplication by `K` acts on the row bits, right multiplication by `K†` acts
//! on the column bits with `conj(K)`, and a Kraus channel acts on both at once
//! through its superoperator. Every operation therefore reduces to the two kernels
//! below.

use super::matrix::{Matrix, C64, I};

/// Applies a `2^k × 2^k` matrix to the listed qubits of a `2^n` vector.
///
/// Local basis index of the matrix is `Σ bit(qubits[i]) << i`.
pub fn apply_local(vec: &mut [C64], matrix: &Matrix, qubits: &[usize]) {
    let k = qubits.len();
    let local = 1usize << k;
    debug_assert_eq!(matrix.dim(), local);
    let offsets: Vec<usize> = (0..local)
        .map(|l| {
            qubits
                .iter()
                .enumerate()
                .filter(|(i, _)| l >> i & 1 == 1)
                .map(|(_, &q)| 1usize << q)
                .sum()
        })
        .collect();
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    let m = matrix.data();
    let n_bases = vec.len() >> k;
    let mut buf = [C64::new(0.0, 0.0); 16];
    let mut heap;
    let amps: &mut [C64] = if local <= 16 {
        &mut buf[..local]
    } else {
        heap = vec![C64::new(0.0, 0.0); local];
        &mut heap
    };
    for i in 0..n_bases {
        let base = insert_zero_bits(i, &sorted);
        for (l, a) in amps.iter_mut().enumerate() {
            *a = vec[base + offsets[l]];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let row = &m[r * local..(r + 1) * local];
            let mut acc = C64::new(0.0, 0.0);
            for (x, a) in row.iter().zip(amps.iter()) {
                acc += x * a;
            }
            vec[base + off] = acc;
        }
    }
}

/// Spreads the bits of `i` over the positions not listed in `sorted_zero_positions`.
#[inline]
fn insert_zero_bits(mut i: usize, sorted_zero_positions: &[usize]) -> usize {
    for &q in sorted_zero_positions {
        let low = i & ((1usize << q) - 1);
        i = ((i >> q) << (q + 1)) | low;
    }
    i
}

/// Bit masks describing a Pauli string acting as `P|x⟩ = i^{n_y} (-1)^{|x ∧ z|} |x ⊕ x_mask⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliMasks {
    pub x_mask: usize,
    pub z_mask: usize,
    pub n_y: u32,
}

impl PauliMasks {
    pub fn shifted(self, by: usize) -> Self {
        Self {
            x_mask: self.x_mask << by,
            z_mask: self.z_mask << by,
            n_y: self.n_y,
        }
    }

    /// Phase acquired by basis state `x` under the string (before the bit flip).
    #[inline]
    pub fn phase(&self, x: usize) -> C64 {
        let sign = if (x & self.z_mask).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        i_pow(self.n_y) * sign
    }
}

#[inline]
pub fn i_pow(k: u32) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => I,
        2 => C64::new(-1.0, 0.0),
        _ => -I,
    }
}

/// Applies `exp(-i·angle/2·P)` in place.
pub fn apply_pauli_rotation(vec: &mut [C64], masks: PauliMasks, angle: f64) {
    let (s, c) = (angle / 2.0).sin_cos();
    let cos = C64::new(c, 0.0);
    let misin = C64::new(0.0, -s);
    if masks.x_mask == 0 {
        for (x, a) in vec.iter_mut().enumerate() {
            *a *= cos + misin * masks.phase(x);
        }
        return;
    }
    let pivot = 1usize << (usize::BITS - 1 - masks.x_mask.leading_zeros());
    for x in 0..vec.len() {
        if x & pivot != 0 {
            continue;
        }
        let y = x ^ masks.x_mask;
        let (ax, ay) = (vec[x], vec[y]);
        // (P a)[x] = phase(y)·a[y], (P a)[y] = phase(x)·a[x]
        vec[x] = cos * ax + misin * masks.phase(y) * ay;
        vec[y] = cos * ay + misin * masks.phase(x) * ax;
    }
}

/// Applies the Pauli string itself in place.
pub fn apply_pauli(vec: &mut [C64], masks: PauliMasks) {
    if masks.x_mask == 0 {
        for (x, a) in vec.iter_mut().enumerate() {
            *a *= masks.phase(x);
        }
        return;
    }
    let pivot = 1usize << (usize::BITS - 1 - masks.x_mask.leading_zeros());
    for x in 0..vec.len() {
        if x & pivot != 0 {
            continue;
        }
        let y = x ^ masks.x_mask;
        let (ax, ay) = (vec[x], vec[y]);
        vec[x] = masks.phase(y) * ay;
        vec[y] = masks.phase(x) * ax;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_zero_bits_skips_positions() {
        assert_eq!(insert_zero_bits(0b11, &[1]), 0b101);
        assert_eq!(insert_zero_bits(0b1, &[0, 2]), 0b10);
        assert_eq!(insert_zero_bits(0b11, &[0, 1]), 0b1100);
    }

    #[test]
    fn y_phase_convention() {
        // Y|0> = i|1>, Y|1> = -i|0>
        let y = PauliMasks {
            x_mask: 1,
            z_mask: 1,
            n_y: 1,
        };
        let mut v = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        apply_pauli(&mut v, y);
        assert_eq!(v[1], I);
        let mut w = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        apply_pauli(&mut w, y);
        assert_eq!(w[0], -I);
    }
}
