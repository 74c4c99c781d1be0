//! Term-wise energy estimation: every non-identity Pauli string is measured in its
//! own circuit execution, exactly or from sampled bitstrings.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::ParametrizedCircuit;
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, PauliTerm};
use crate::noise::{attach_noise, CompiledNoisyCircuit, NoiseModel, NoisyCircuit};
use crate::seed::hash64;
use crate::sim::{DensityMatrix, GateOp, OutcomeSampler, Pauli, QuantumState, Statevector};

/// Default shot count per Pauli term.
pub const DEFAULT_SHOTS: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BackendMode {
    #[serde(rename = "EXACT")]
    Exact,
    #[serde(rename = "SHOTS")]
    Shots,
    #[serde(rename = "NOISY")]
    Noisy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendConfig {
    pub mode: BackendMode,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub rng_seed: u64,
}

fn default_shots() -> u64 {
    DEFAULT_SHOTS
}

impl BackendConfig {
    pub fn exact() -> Self {
        Self {
            mode: BackendMode::Exact,
            shots: DEFAULT_SHOTS,
            noise: None,
            rng_seed: 0,
        }
    }

    pub fn shots(shots: u64, rng_seed: u64) -> Self {
        Self {
            mode: BackendMode::Shots,
            shots,
            noise: None,
            rng_seed,
        }
    }

    pub fn noisy(noise: NoiseModel, shots: u64, rng_seed: u64) -> Self {
        Self {
            mode: BackendMode::Noisy,
            shots,
            noise: Some(noise),
            rng_seed,
        }
    }

    pub fn with_seed(mut self, rng_seed: u64) -> Self {
        self.rng_seed = rng_seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match (self.mode, &self.noise) {
            (BackendMode::Noisy, Some(m)) => m.validate()?,
            (BackendMode::Noisy, None) => {
                return Err(Error::InvalidBackend("NOISY mode requires a noise model".into()))
            }
            (_, Some(_)) => {
                return Err(Error::InvalidBackend(
                    "noise model given for a noiseless mode".into(),
                ))
            }
            _ => {}
        }
        if self.mode != BackendMode::Exact && self.shots == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(())
    }

    pub fn noise_model(&self) -> NoiseModel {
        self.noise.unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    pub term: PauliTerm,
    pub estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub per_term: Vec<TermEstimate>,
    pub shots_used: u64,
}

/// Measurement-basis rotation: `H` for X, `S†` then `H` for Y, nothing otherwise.
pub fn basis_change(term: &PauliTerm) -> Vec<GateOp> {
    let mut gates = Vec::new();
    for (q, p) in term.paulis.paulis().iter().enumerate() {
        match p {
            Pauli::X => gates.push(GateOp::h(q)),
            Pauli::Y => {
                gates.push(GateOp::sdg(q));
                gates.push(GateOp::h(q));
            }
            _ => {}
        }
    }
    gates
}

/// `(−1)^(number of set bits on the term's support)`.
pub fn outcome_eigenvalue(term: &PauliTerm, bits: usize) -> f64 {
    parity_sign(bits & support_mask(term))
}

fn support_mask(term: &PauliTerm) -> usize {
    term.paulis
        .paulis()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p != Pauli::I)
        .fold(0, |m, (q, _)| m | 1 << q)
}

#[inline]
fn parity_sign(x: usize) -> f64 {
    if x.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

struct PreparedTerm {
    index: usize,
    support: usize,
    basis_change: Vec<GateOp>,
    noisy_basis_change: Option<CompiledNoisyCircuit>,
}

/// Reusable estimator for one (circuit, Hamiltonian, backend) triple.
///
/// Every [`evaluate`](Self::evaluate) call advances the evaluation counter that
/// enters the per-term sub-seeds.
pub struct Estimator {
    circuit: ParametrizedCircuit,
    hamiltonian: Hamiltonian,
    backend: BackendConfig,
    terms: Vec<PreparedTerm>,
    counter: u64,
    density_path: bool,
}

impl Estimator {
    pub fn new(circuit: ParametrizedCircuit, hamiltonian: Hamiltonian, backend: BackendConfig) -> Result<Self> {
        backend.validate()?;
        if circuit.n_qubits != hamiltonian.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: circuit.n_qubits,
                got: hamiltonian.n_qubits(),
            });
        }
        let model = backend.noise_model();
        let gate_noise = backend.mode == BackendMode::Noisy && !model.gate_noise_free();
        let n = circuit.n_qubits;
        let mut terms = Vec::new();
        for (index, term) in hamiltonian.terms().iter().enumerate() {
            if term.is_identity() {
                continue;
            }
            let basis_change = basis_change(term);
            let noisy_basis_change = if backend.mode == BackendMode::Noisy {
                let mut c = NoisyCircuit::empty(&model)?;
                c.extend_gates(&basis_change);
                Some(c.compile(n)?)
            } else {
                None
            };
            terms.push(PreparedTerm {
                index,
                support: support_mask(term),
                basis_change,
                noisy_basis_change,
            });
        }
        Ok(Self {
            circuit,
            hamiltonian,
            backend,
            terms,
            counter: 0,
            density_path: gate_noise,
        })
    }

    /// Forces NOISY evaluations through the density-matrix path even when the
    /// model has no gate-level noise.
    pub fn force_density_path(&mut self, on: bool) {
        if self.backend.mode == BackendMode::Noisy {
            self.density_path = on || !self.backend.noise_model().gate_noise_free();
        }
    }

    pub fn backend(&self) -> &BackendConfig {
        &self.backend
    }

    pub fn circuit(&self) -> &ParametrizedCircuit {
        &self.circuit
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn evaluations(&self) -> u64 {
        self.counter
    }

    pub fn evaluate(&mut self, params: &[f64]) -> Result<EnergyEstimate> {
        let out = self.evaluate_at(params, self.counter)?;
        self.counter += 1;
        Ok(out)
    }

    /// Evaluation with an explicit counter; does not touch internal state.
    pub fn evaluate_at(&self, params: &[f64], counter: u64) -> Result<EnergyEstimate> {
        let bound = self.circuit.bind(params)?;
        let n = self.circuit.n_qubits;
        let shots = self.backend.shots;
        let seed = |index: usize| hash64(&[self.backend.rng_seed, index as u64, counter]);
        let per_term_values: Vec<(usize, f64)> = match self.backend.mode {
            BackendMode::Exact => {
                let psi = run_pure(n, &bound)?;
                self.terms
                    .iter()
                    .map(|t| {
                        let masks = self.hamiltonian.terms()[t.index].paulis.masks();
                        (t.index, psi.pauli_expectation(masks).re)
                    })
                    .collect()
            }
            BackendMode::Shots => {
                let psi = run_pure(n, &bound)?;
                self.terms
                    .iter()
                    .map(|t| {
                        let mut rotated = psi.clone();
                        rotated.apply_gates(&t.basis_change)?;
                        let mean = sample_mean(&rotated.probabilities(), t.support, shots, 0.0, n, seed(t.index));
                        Ok((t.index, mean))
                    })
                    .collect::<Result<_>>()?
            }
            BackendMode::Noisy => {
                let p_readout = self.backend.noise_model().p_readout;
                if self.density_path {
                    let prefix = attach_noise(&bound, &self.backend.noise_model(), 0)?.compile(n)?;
                    let mut rho = DensityMatrix::zero(n);
                    prefix.run(&mut rho)?;
                    self.terms
                        .iter()
                        .map(|t| {
                            let mut rotated = rho.clone();
                            t.noisy_basis_change
                                .as_ref()
                                .expect("prepared for NOISY mode")
                                .run(&mut rotated)?;
                            let mean =
                                sample_mean(&rotated.probabilities(), t.support, shots, p_readout, n, seed(t.index));
                            Ok((t.index, mean))
                        })
                        .collect::<Result<_>>()?
                } else {
                    let psi = run_pure(n, &bound)?;
                    self.terms
                        .iter()
                        .map(|t| {
                            let mut rotated = psi.clone();
                            rotated.apply_gates(&t.basis_change)?;
                            let mean =
                                sample_mean(&rotated.probabilities(), t.support, shots, p_readout, n, seed(t.index));
                            Ok((t.index, mean))
                        })
                        .collect::<Result<_>>()?
                }
            }
        };
        let mut per_term = Vec::with_capacity(self.hamiltonian.terms().len());
        let mut value = 0.0;
        let mut it = per_term_values.into_iter().peekable();
        for (index, term) in self.hamiltonian.terms().iter().enumerate() {
            let estimate = if term.is_identity() {
                1.0
            } else {
                let (i, v) = it.next().expect("one value per non-identity term");
                debug_assert_eq!(i, index);
                v
            };
            value += term.coeff * estimate;
            per_term.push(TermEstimate {
                term: term.clone(),
                estimate,
            });
        }
        let shots_used = match self.backend.mode {
            BackendMode::Exact => 0,
            _ => shots * self.terms.len() as u64,
        };
        Ok(EnergyEstimate {
            value,
            per_term,
            shots_used,
        })
    }

    /// Noise-averaged expectation without sampling: gate noise through the density
    /// matrix and readout flips folded in as the factor `(1 − 2p)^weight`.
    pub fn expected_value(&self, params: &[f64]) -> Result<f64> {
        let bound = self.circuit.bind(params)?;
        let n = self.circuit.n_qubits;
        let model = self.backend.noise_model();
        let mut rho = DensityMatrix::zero(n);
        attach_noise(&bound, &model, 0)?.compile(n)?.run(&mut rho)?;
        let mut value = self.hamiltonian.identity_coefficient();
        for t in &self.terms {
            let mut rotated = rho.clone();
            if let Some(bc) = &t.noisy_basis_change {
                bc.run(&mut rotated)?;
            } else {
                rotated.apply_gates(&t.basis_change)?;
            }
            let term = &self.hamiltonian.terms()[t.index];
            let z: f64 = rotated
                .probabilities()
                .iter()
                .enumerate()
                .map(|(x, p)| p * parity_sign(x & t.support))
                .sum();
            let shrink = (1.0 - 2.0 * model.p_readout).powi(term.paulis.weight() as i32);
            value += term.coeff * z * shrink;
        }
        Ok(value)
    }
}

fn run_pure(n: usize, gates: &[GateOp]) -> Result<Statevector> {
    let mut psi = Statevector::zero(n);
    psi.apply_gates(gates)?;
    Ok(psi)
}

/// Draws `shots` bitstrings, flips each of the `n` measured bits with probability
/// `p_flip`, and averages the parity eigenvalue on `support`.
fn sample_mean(probabilities: &[f64], support: usize, shots: u64, p_flip: f64, n: usize, seed: u64) -> f64 {
    let sampler = OutcomeSampler::new(probabilities);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0i64;
    for _ in 0..shots {
        let mut bits = sampler.draw(&mut rng);
        if p_flip > 0.0 {
            for q in 0..n {
                if rng.gen::<f64>() < p_flip {
                    bits ^= 1 << q;
                }
            }
        }
        sum += if (bits & support).count_ones() % 2 == 0 { 1 } else { -1 };
    }
    sum as f64 / shots as f64
}

/// One-off estimate with evaluation counter 0.
pub fn estimate_energy(
    circuit: &ParametrizedCircuit,
    params: &[f64],
    h: &Hamiltonian,
    backend: &BackendConfig,
) -> Result<EnergyEstimate> {
    Estimator::new(circuit.clone(), h.clone(), *backend)?.evaluate_at(params, 0)
}
