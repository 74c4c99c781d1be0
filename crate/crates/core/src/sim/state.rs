use super::channel::KrausChannel;
use super::eigen::hermitian_eigen;
use super::gate::{GateKind, GateOp};
use super::kernel::{apply_local, apply_pauli, apply_pauli_rotation, PauliMasks};
use super::matrix::{Matrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-10;

/// Common surface of pure and mixed states.
pub trait QuantumState: Clone {
    fn n_qubits(&self) -> usize;

    /// Applies a validated gate in place.
    fn apply_gate(&mut self, gate: &GateOp) -> Result<()>;

    /// Born probabilities of the computational basis, indexed little-endian.
    fn probabilities(&self) -> Vec<f64>;

    /// `⟨P⟩` for a Pauli string given by its masks. Real part only; the imaginary
    /// residue of a Hermitian observable is numerically zero.
    fn pauli_expectation(&self, masks: PauliMasks) -> C64;

    fn apply_gates(&mut self, gates: &[GateOp]) -> Result<()> {
        gates.iter().try_for_each(|g| self.apply_gate(g))
    }
}

/// Pure state of `n` qubits. Amplitude index bit `i` is qubit `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        Self { n_qubits, amps }
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                got: amps.len(),
            });
        }
        let s = Self { n_qubits, amps };
        let dev = (s.norm() - 1.0).abs();
        if dev > NORM_TOL {
            return Err(Error::NotNormalized(dev));
        }
        Ok(s)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Statevector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    pub(crate) fn apply_gate_unchecked(amps: &mut [C64], gate: &GateOp) {
        if gate.kind == GateKind::PauliRotation {
            let masks = gate.rotation_masks().expect("validated rotation");
            apply_pauli_rotation(amps, masks, gate.angle.expect("validated rotation"));
        } else {
            let m = gate.matrix().expect("fixed-matrix gate");
            apply_local(amps, &m, &gate.qubits);
        }
    }
}

impl QuantumState for Statevector {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        Self::apply_gate_unchecked(&mut self.amps, gate);
        Ok(())
    }

    fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn pauli_expectation(&self, masks: PauliMasks) -> C64 {
        let mut p = self.amps.clone();
        apply_pauli(&mut p, masks);
        self.amps.iter().zip(&p).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Mixed state of `n` qubits stored as a dense row-major `2^n × 2^n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::from_pure(&Statevector::zero(n_qubits))
    }

    pub fn from_pure(psi: &Statevector) -> Self {
        let a = psi.amplitudes();
        let dim = a.len();
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = a[r] * a[c].conj();
            }
        }
        Self {
            n_qubits: psi.n_qubits(),
            data,
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        Self { n_qubits, data }
    }

    /// Wraps a matrix after checking Hermiticity, unit trace and positivity.
    pub fn from_matrix(n_qubits: usize, m: Matrix) -> Result<Self> {
        if m.dim() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                got: m.dim(),
            });
        }
        let rho = Self {
            n_qubits,
            data: m.data().to_vec(),
        };
        let dev = (rho.trace() - 1.0).abs();
        if dev > NORM_TOL || !rho.is_hermitian(NORM_TOL) || rho.min_eigenvalue() < -1e-9 {
            return Err(Error::NotNormalized(dev));
        }
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_rows(self.dim(), self.data.clone())
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re).sum()
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // ρ Hermitian: Tr(ρ²) = Σ |ρ_ij|²
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|r| (r..d).all(|c| (self.data[r * d + c] - self.data[c * d + r].conj()).norm() <= tol))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.to_matrix()).0[0]
    }

    /// Applies `Σ_k E_k ρ E_k†` on the addressed qubits.
    pub fn apply_channel(&mut self, channel: &KrausChannel, qubits: &[usize]) -> Result<()> {
        if channel.arity() != qubits.len() {
            return Err(Error::ArityMismatch {
                arity: channel.arity(),
                qubits: qubits.len(),
            });
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        self.apply_channel_unchecked(channel, qubits);
        Ok(())
    }

    pub(crate) fn apply_channel_unchecked(&mut self, channel: &KrausChannel, qubits: &[usize]) {
        self.apply_superop_unchecked(channel.superoperator(), qubits);
    }

    /// Applies a superoperator in the `conj(E) ⊗ E` layout on the addressed qubits.
    pub(crate) fn apply_superop_unchecked(&mut self, superop: &Matrix, qubits: &[usize]) {
        let n = self.n_qubits;
        let mut sites: Vec<usize> = qubits.iter().map(|&q| q + n).collect();
        sites.extend_from_slice(qubits);
        apply_local(&mut self.data, superop, &sites);
    }

    /// Applies a unitary given as a local matrix: `ρ → UρU†`.
    pub(crate) fn apply_unitary_local(&mut self, u: &Matrix, qubits: &[usize]) {
        let n = self.n_qubits;
        let rows: Vec<usize> = qubits.iter().map(|&q| q + n).collect();
        apply_local(&mut self.data, u, &rows);
        apply_local(&mut self.data, &u.conj(), qubits);
    }
}

impl QuantumState for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        if gate.kind == GateKind::PauliRotation {
            let masks = gate.rotation_masks().expect("validated rotation");
            let angle = gate.angle.expect("validated rotation");
            apply_pauli_rotation(&mut self.data, masks.shifted(self.n_qubits), angle);
            // ρU†: conj(exp(-iθ/2 P)) = exp(-i(-θ)/2·conj(P)), conj(P) = (-1)^{n_y} P
            let sign = if masks.n_y % 2 == 0 { 1.0 } else { -1.0 };
            apply_pauli_rotation(&mut self.data, masks, -angle * sign);
        } else {
            let m = gate.matrix().expect("fixed-matrix gate");
            self.apply_unitary_local(&m, &gate.qubits);
        }
        Ok(())
    }

    fn probabilities(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re.max(0.0)).collect()
    }

    fn pauli_expectation(&self, masks: PauliMasks) -> C64 {
        // Tr(Pρ) = Σ_x phase(x ⊕ m)·ρ[x ⊕ m][x]
        let d = self.dim();
        (0..d)
            .map(|x| {
                let y = x ^ masks.x_mask;
                masks.phase(y) * self.data[y * d + x]
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn x_flips_zero() {
        let mut s = Statevector::zero(1);
        s.apply_gate(&GateOp::x(0)).unwrap();
        assert_eq!(s.amplitudes()[1], ONE);
    }

    #[test]
    fn cnot_truth_table() {
        // |10> (qubit 0 set) -> |11>
        let mut s = Statevector::basis(2, 0b01);
        s.apply_gate(&GateOp::cnot(0, 1)).unwrap();
        assert_eq!(s.amplitudes()[0b11], ONE);
        let mut s = Statevector::basis(2, 0b10);
        s.apply_gate(&GateOp::cnot(0, 1)).unwrap();
        assert_eq!(s.amplitudes()[0b10], ONE);
    }

    #[test]
    fn ry_half_pi_makes_plus() {
        let mut s = Statevector::zero(1);
        s.apply_gate(&GateOp::ry(0, PI / 2.0)).unwrap();
        assert!((s.amplitudes()[0] - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        assert!((s.amplitudes()[1] - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gate_errors_propagate() {
        let mut s = Statevector::zero(2);
        assert!(s.apply_gate(&GateOp::x(2)).is_err());
        let mut rho = DensityMatrix::zero(2);
        let mut g = GateOp::ry(0, 1.0);
        g.angle = None;
        assert!(rho.apply_gate(&g).is_err());
    }

    #[test]
    fn from_amplitudes_checks_norm() {
        assert!(Statevector::from_amplitudes(1, vec![ONE, ONE]).is_err());
        assert!(Statevector::from_amplitudes(1, vec![ONE]).is_err());
    }

    #[test]
    fn pauli_rotation_matches_its_decomposition() {
        let g = GateOp::pauli_rotation(vec![0, 2, 3], "YZX".parse().unwrap(), 0.83);
        let dense = g.unitary(4).unwrap();
        let mut composed = Matrix::identity(16);
        for h in g.decompose() {
            composed = h.unitary(4).unwrap().matmul(&composed);
        }
        assert!(dense.max_abs_diff(&composed) < 1e-12);
    }

    #[test]
    fn density_pauli_rotation_matches_pure() {
        let g = GateOp::pauli_rotation(vec![1, 0, 3], "YYX".parse().unwrap(), -1.1);
        let mut psi = Statevector::zero(4);
        psi.apply_gate(&GateOp::h(0)).unwrap();
        psi.apply_gate(&GateOp::ry(3, 0.4)).unwrap();
        let mut rho = psi.to_density();
        psi.apply_gate(&g).unwrap();
        rho.apply_gate(&g).unwrap();
        assert!(rho.to_matrix().max_abs_diff(&psi.to_density().to_matrix()) < 1e-12);
    }
}
