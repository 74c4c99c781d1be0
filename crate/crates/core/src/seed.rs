//! Deterministic seed derivation.
//!
//! `hash64(&[a, b, c])` folds each word into a SplitMix64 state:
//! `s₀ = 0x9E3779B97F4A7C15`, `sᵢ₊₁ = mix(sᵢ ⊕ wordᵢ)`, where `mix` is the SplitMix64
//! finalizer. The function is stable across platforms and releases.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn hash64(words: &[u64]) -> u64 {
    words.iter().fold(GOLDEN, |s, &w| mix(s ^ w))
}
