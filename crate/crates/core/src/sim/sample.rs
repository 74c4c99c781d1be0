use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::state::QuantumState;
use crate::error::{Error, Result};

/// Formats a basis index as a bitstring, qubit 0 first.
pub fn format_bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a qubit-0-first bitstring into a basis index.
pub fn parse_bitstring(bits: &str) -> Result<usize> {
    bits.chars().enumerate().try_fold(0usize, |acc, (q, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << q),
        _ => Err(Error::InvalidPauli(bits.to_string())),
    })
}

/// Inverse-CDF sampler over a fixed outcome distribution.
#[derive(Clone, Debug)]
pub struct OutcomeSampler {
    cumulative: Vec<f64>,
}

impl OutcomeSampler {
    pub fn new(probabilities: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probabilities
            .iter()
            .map(|&p| {
                acc += p.max(0.0);
                acc
            })
            .collect();
        // guard against round-off in the total
        let total = acc;
        for c in &mut cumulative {
            *c /= total;
        }
        Self { cumulative }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1)
    }
}

/// Draws `shots` computational-basis outcomes from the Born distribution.
pub fn sample_counts<S: QuantumState>(
    state: &S,
    shots: u64,
    rng_seed: u64,
) -> Result<BTreeMap<String, u64>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let sampler = OutcomeSampler::new(&state.probabilities());
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut by_index: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..shots {
        *by_index.entry(sampler.draw(&mut rng)).or_default() += 1;
    }
    let n = state.n_qubits();
    Ok(by_index
        .into_iter()
        .map(|(i, c)| (format_bitstring(i, n), c))
        .collect())
}

/// Exact-mode counterpart of [`sample_counts`]: Born probabilities keyed by bitstring.
pub fn exact_distribution<S: QuantumState>(state: &S) -> BTreeMap<String, f64> {
    let n = state.n_qubits();
    state
        .probabilities()
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > 0.0)
        .map(|(i, p)| (format_bitstring(i, n), p))
        .collect()
}
