use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::kernel::PauliMasks;
use super::matrix::{Matrix, C64, I, ONE, ZERO};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Matrix {
        match self {
            Pauli::I => Matrix::identity(2),
            Pauli::X => Matrix::from_rows(2, vec![ZERO, ONE, ONE, ZERO]),
            Pauli::Y => Matrix::from_rows(2, vec![ZERO, -I, I, ZERO]),
            Pauli::Z => Matrix::from_rows(2, vec![ONE, ZERO, ZERO, -ONE]),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-qubit Paulis, stored qubit-0-first.
///
/// The textual form is the same order: `"ZIIX"` is `Z` on qubit 0 and `X` on qubit 3.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(paulis: Vec<Pauli>) -> Self {
        Self(paulis)
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self(vec![Pauli::I; n_qubits])
    }

    /// Places the given Paulis on the listed qubits of an `n_qubits` register.
    pub fn sparse(n_qubits: usize, ops: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n_qubits);
        for &(q, p) in ops {
            s.0[q] = p;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn paulis(&self) -> &[Pauli] {
        &self.0
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        self.0[qubit]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks {
            x_mask: 0,
            z_mask: 0,
            n_y: 0,
        };
        for (q, p) in self.0.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => m.x_mask |= 1 << q,
                Pauli::Z => m.z_mask |= 1 << q,
                Pauli::Y => {
                    m.x_mask |= 1 << q;
                    m.z_mask |= 1 << q;
                    m.n_y += 1;
                }
            }
        }
        m
    }

    /// Dense matrix in the little-endian basis (qubit 0 is the least significant bit).
    pub fn matrix(&self) -> Matrix {
        self.0
            .iter()
            .fold(Matrix::identity(1), |acc, p| p.matrix().kron(&acc))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Pauli::from_symbol)
            .collect::<Option<Vec<_>>>()
            .map(PauliString)
            .ok_or_else(|| Error::InvalidPauli(s.to_string()))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    RX,
    RY,
    RZ,
    CNOT,
    PauliRotation,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "Sdg",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::CNOT => "CNOT",
            GateKind::PauliRotation => "PauliRotation",
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(
            self,
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::PauliRotation
        )
    }
}

/// One gate of a concrete circuit.
///
/// For `PauliRotation` the axis has one symbol per entry of `qubits` and the gate is
/// `exp(-i·angle/2·P)`. `CNOT` qubits are `[control, target]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pauli_axis: Option<PauliString>,
}

impl GateOp {
    fn fixed(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self {
            kind,
            qubits,
            angle: None,
            pauli_axis: None,
        }
    }

    pub fn x(q: usize) -> Self {
        Self::fixed(GateKind::X, vec![q])
    }
    pub fn y(q: usize) -> Self {
        Self::fixed(GateKind::Y, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Self::fixed(GateKind::Z, vec![q])
    }
    pub fn h(q: usize) -> Self {
        Self::fixed(GateKind::H, vec![q])
    }
    pub fn s(q: usize) -> Self {
        Self::fixed(GateKind::S, vec![q])
    }
    pub fn sdg(q: usize) -> Self {
        Self::fixed(GateKind::Sdg, vec![q])
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::CNOT, vec![control, target])
    }

    pub fn rotation(kind: GateKind, q: usize, angle: f64) -> Self {
        debug_assert!(matches!(kind, GateKind::RX | GateKind::RY | GateKind::RZ));
        Self {
            kind,
            qubits: vec![q],
            angle: Some(angle),
            pauli_axis: None,
        }
    }
    pub fn rx(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::RX, q, angle)
    }
    pub fn ry(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::RY, q, angle)
    }
    pub fn rz(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::RZ, q, angle)
    }

    /// `exp(-i·angle/2·P)` with `axis[i]` acting on `qubits[i]`.
    pub fn pauli_rotation(qubits: Vec<usize>, axis: PauliString, angle: f64) -> Self {
        Self {
            kind: GateKind::PauliRotation,
            qubits,
            angle: Some(angle),
            pauli_axis: Some(axis),
        }
    }

    pub fn arity(&self) -> usize {
        self.qubits.len()
    }

    /// Checks qubit indices against a register size and the angle/axis contract.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let name = self.kind.name();
        let expected = match self.kind {
            GateKind::CNOT => Some(2),
            GateKind::PauliRotation => None,
            _ => Some(1),
        };
        if let Some(expected) = expected {
            if self.qubits.len() != expected {
                return Err(Error::WrongQubitCount {
                    kind: name,
                    expected,
                    got: self.qubits.len(),
                });
            }
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            if self.qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        match (self.kind.is_rotation(), self.angle) {
            (true, None) => return Err(Error::MissingAngle(name)),
            (false, Some(_)) => return Err(Error::UnexpectedAngle(name)),
            _ => {}
        }
        if self.kind == GateKind::PauliRotation {
            match &self.pauli_axis {
                Some(axis) if axis.len() == self.qubits.len() && !self.qubits.is_empty() => {}
                _ => return Err(Error::MissingPauliAxis),
            }
        } else if self.pauli_axis.is_some() {
            return Err(Error::MissingPauliAxis);
        }
        Ok(())
    }

    /// Dense local matrix for every kind except `PauliRotation`, which is applied
    /// through its Pauli masks instead.
    pub fn matrix(&self) -> Option<Matrix> {
        let half = self.angle.unwrap_or(0.0) / 2.0;
        let (s, c) = half.sin_cos();
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let m = match self.kind {
            GateKind::X => Pauli::X.matrix(),
            GateKind::Y => Pauli::Y.matrix(),
            GateKind::Z => Pauli::Z.matrix(),
            GateKind::H => Matrix::from_rows(2, vec![h, h, h, -h]),
            GateKind::S => Matrix::diagonal(&[ONE, I]),
            GateKind::Sdg => Matrix::diagonal(&[ONE, -I]),
            GateKind::RX => Matrix::from_rows(
                2,
                vec![
                    C64::new(c, 0.0),
                    C64::new(0.0, -s),
                    C64::new(0.0, -s),
                    C64::new(c, 0.0),
                ],
            ),
            GateKind::RY => Matrix::from_rows(
                2,
                vec![
                    C64::new(c, 0.0),
                    C64::new(-s, 0.0),
                    C64::new(s, 0.0),
                    C64::new(c, 0.0),
                ],
            ),
            GateKind::RZ => Matrix::diagonal(&[C64::new(c, -s), C64::new(c, s)]),
            // local index = bit(control) + 2·bit(target)
            GateKind::CNOT => Matrix::from_real(
                4,
                &[
                    1.0, 0.0, 0.0, 0.0, //
                    0.0, 0.0, 0.0, 1.0, //
                    0.0, 0.0, 1.0, 0.0, //
                    0.0, 1.0, 0.0, 0.0,
                ],
            ),
            GateKind::PauliRotation => return None,
        };
        Some(m)
    }

    /// Pauli masks of a `PauliRotation` in register coordinates.
    pub fn rotation_masks(&self) -> Option<PauliMasks> {
        let axis = self.pauli_axis.as_ref()?;
        let mut m = PauliMasks {
            x_mask: 0,
            z_mask: 0,
            n_y: 0,
        };
        for (&q, &p) in self.qubits.iter().zip(axis.paulis()) {
            match p {
                Pauli::I => {}
                Pauli::X => m.x_mask |= 1 << q,
                Pauli::Z => m.z_mask |= 1 << q,
                Pauli::Y => {
                    m.x_mask |= 1 << q;
                    m.z_mask |= 1 << q;
                    m.n_y += 1;
                }
            }
        }
        Some(m)
    }

    /// Full `2^n × 2^n` unitary of the gate on an `n_qubits` register.
    pub fn unitary(&self, n_qubits: usize) -> Result<Matrix> {
        self.validate(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut u = Matrix::zeros(dim);
        for col in 0..dim {
            let mut v = vec![ZERO; dim];
            v[col] = ONE;
            super::Statevector::apply_gate_unchecked(&mut v, self);
            for (row, a) in v.into_iter().enumerate() {
                u[(row, col)] = a;
            }
        }
        Ok(u)
    }

    /// Hardware-level expansion used for noise accounting.
    ///
    /// A `k`-qubit Pauli rotation becomes: basis change on every non-identity qubit
    /// (`H` for X, `Sdg`+`H` for Y), a CNOT staircase along the support, `RZ(angle)` on
    /// the last support qubit, the mirrored staircase, and the inverse basis change.
    /// That is `2(k-1)` CNOTs and one RZ. Other gates expand to themselves.
    pub fn decompose(&self) -> Vec<GateOp> {
        if self.kind != GateKind::PauliRotation {
            return vec![self.clone()];
        }
        let axis = self.pauli_axis.as_ref().expect("validated Pauli rotation");
        let support: Vec<(usize, Pauli)> = self
            .qubits
            .iter()
            .zip(axis.paulis())
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(&q, &p)| (q, p))
            .collect();
        if support.is_empty() {
            // global phase only
            return Vec::new();
        }
        let angle = self.angle.expect("validated rotation");
        let mut out = Vec::new();
        for &(q, p) in &support {
            match p {
                Pauli::X => out.push(GateOp::h(q)),
                Pauli::Y => {
                    out.push(GateOp::sdg(q));
                    out.push(GateOp::h(q));
                }
                _ => {}
            }
        }
        for w in support.windows(2) {
            out.push(GateOp::cnot(w[0].0, w[1].0));
        }
        out.push(GateOp::rz(support[support.len() - 1].0, angle));
        for w in support.windows(2).rev() {
            out.push(GateOp::cnot(w[0].0, w[1].0));
        }
        for &(q, p) in &support {
            match p {
                Pauli::X => out.push(GateOp::h(q)),
                Pauli::Y => {
                    out.push(GateOp::h(q));
                    out.push(GateOp::s(q));
                }
                _ => {}
            }
        }
        out
    }
}

/// Circuit depth counting every gate as one layer on the qubits it touches.
pub fn circuit_depth(gates: &[GateOp]) -> usize {
    let mut frontier: Vec<usize> = Vec::new();
    for g in gates {
        let top = g.qubits.iter().map(|&q| frontier.get(q).copied().unwrap_or(0)).max();
        let level = top.unwrap_or(0) + 1;
        for &q in &g.qubits {
            if q >= frontier.len() {
                frontier.resize(q + 1, 0);
            }
            frontier[q] = level;
        }
    }
    frontier.into_iter().max().unwrap_or(0)
}
