//! Weighted Pauli-string Hamiltonians, the fixed H₂ instance, and exact reference values.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{hermitian_eigen, Matrix, PauliString, QuantumState, Statevector, C64};

/// Reference full-CI ground-state energy of H₂ in Hartree.
///
/// The rounded coefficients in [`H2_COEFFICIENTS`] put the minimum eigenvalue of
/// [`h2_hamiltonian`] at −1.1361891624004867, about 2.9e-7 Ha above this value.
pub const H2_GROUND_ENERGY: f64 = -1.136189454088;

/// Interatomic distance (bohr) at which the H₂ coefficients were generated.
pub const H2_BOND_LENGTH_AU: f64 = 1.3228;

/// H₂ coefficients `c₁ … c₉` (STO-3G, Jordan-Wigner, 4 spin orbitals).
pub const H2_COEFFICIENTS: [f64; 9] = [
    -0.04207254303152995,
    0.17771358191549907,
    0.17771358191549919,
    -0.2427450172749822,
    0.12293330460167415,
    0.16768338881432715,
    0.17059759240560826,
    0.17627661476093917,
    0.04475008421265302,
];

/// Largest register handled by dense diagonalization.
pub const MAX_SPECTRUM_QUBITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub paulis: PauliString,
}

impl PauliTerm {
    pub fn new(coeff: f64, paulis: PauliString) -> Self {
        Self { coeff, paulis }
    }

    pub fn parse(coeff: f64, paulis: &str) -> Result<Self> {
        Ok(Self::new(coeff, paulis.parse()?))
    }

    pub fn is_identity(&self) -> bool {
        self.paulis.is_identity()
    }
}

/// `H = Σ_k h_k P_k` with at most one term per Pauli string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHamiltonian")]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl TryFrom<RawHamiltonian> for Hamiltonian {
    type Error = Error;

    fn try_from(raw: RawHamiltonian) -> Result<Self> {
        Hamiltonian::new(raw.n_qubits, raw.terms)
    }
}

impl Hamiltonian {
    /// Validates term lengths and coefficients and merges duplicate strings,
    /// keeping the position of the first occurrence.
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        let mut merged: Vec<PauliTerm> = Vec::with_capacity(terms.len());
        let mut seen: HashMap<PauliString, usize> = HashMap::new();
        for t in terms {
            if t.paulis.len() != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    got: t.paulis.len(),
                });
            }
            if !t.coeff.is_finite() {
                return Err(Error::NonFiniteCoefficient(t.paulis.to_string()));
            }
            match seen.get(&t.paulis) {
                Some(&i) => merged[i].coeff += t.coeff,
                None => {
                    seen.insert(t.paulis.clone(), merged.len());
                    merged.push(t);
                }
            }
        }
        Ok(Self {
            n_qubits,
            terms: merged,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Coefficient of the all-identity string (zero when absent).
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.is_identity())
            .map(|t| t.coeff)
            .sum()
    }

    pub fn coefficient(&self, paulis: &str) -> Option<f64> {
        let p: PauliString = paulis.parse().ok()?;
        self.terms.iter().find(|t| t.paulis == p).map(|t| t.coeff)
    }

    /// `Σ_k |h_k|`, a bound on the spectral radius.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    pub fn dense(&self) -> Matrix {
        let mut m = Matrix::zeros(1 << self.n_qubits);
        for t in &self.terms {
            m.add_assign(&term_matrix(t));
        }
        m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("hamiltonian serializes")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// The 15-term, 4-qubit H₂ Hamiltonian with grouped terms stored expanded.
pub fn h2_hamiltonian() -> Hamiltonian {
    let c = H2_COEFFICIENTS;
    let spec: [(f64, &str); 15] = [
        (c[0], "IIII"),
        (c[1], "ZIII"),
        (c[2], "IZII"),
        (c[3], "IIZI"),
        (c[3], "IIIZ"),
        (c[4], "ZIZI"),
        (c[4], "IZIZ"),
        (c[5], "ZIIZ"),
        (c[5], "IZZI"),
        (c[6], "ZZII"),
        (c[7], "IIZZ"),
        (c[8], "YXXY"),
        (c[8], "XYYX"),
        (-c[8], "YYXX"),
        (-c[8], "XXYY"),
    ];
    let terms = spec
        .iter()
        .map(|&(h, s)| PauliTerm::parse(h, s).expect("static Pauli string"))
        .collect();
    Hamiltonian::new(4, terms).expect("static Hamiltonian")
}

/// Dense `coeff · P` in the little-endian basis.
pub fn term_matrix(term: &PauliTerm) -> Matrix {
    term.paulis.matrix().scale(C64::new(term.coeff, 0.0))
}

/// `Σ_k h_k ⟨P_k⟩` computed analytically.
pub fn expectation_exact<S: QuantumState>(state: &S, h: &Hamiltonian) -> Result<f64> {
    if state.n_qubits() != h.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: h.n_qubits,
            got: state.n_qubits(),
        });
    }
    let mut energy = C64::new(0.0, 0.0);
    for t in &h.terms {
        if t.is_identity() {
            energy += t.coeff;
        } else {
            energy += state.pauli_expectation(t.paulis.masks()) * t.coeff;
        }
    }
    debug_assert!(energy.im.abs() < 1e-10, "imaginary residue {}", energy.im);
    Ok(energy.re)
}

/// All `2^n` eigenvalues, ascending.
pub fn exact_spectrum(h: &Hamiltonian) -> Result<Vec<f64>> {
    if h.n_qubits > MAX_SPECTRUM_QUBITS {
        return Err(Error::SystemTooLarge(h.n_qubits));
    }
    Ok(hermitian_eigen(&h.dense()).0)
}

/// Lowest eigenvalue together with a normalized eigenvector.
pub fn ground_state(h: &Hamiltonian) -> Result<(f64, Statevector)> {
    if h.n_qubits > MAX_SPECTRUM_QUBITS {
        return Err(Error::SystemTooLarge(h.n_qubits));
    }
    let (vals, vecs) = hermitian_eigen(&h.dense());
    let v = vecs.into_iter().next().expect("non-empty spectrum");
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let v = v.into_iter().map(|a| a / norm).collect();
    Ok((vals[0], Statevector::from_amplitudes(h.n_qubits, v)?))
}
