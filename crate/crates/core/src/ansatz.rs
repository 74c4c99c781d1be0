//! Parametrized circuits over the Hartree-Fock reference: the hardware-efficient
//! `RXYZ` and `RY` layers and the Trotterized UCCSD ansatz for H₂.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{circuit_depth, GateOp, PauliString};

/// Electrons in H₂.
pub const H2_ELECTRONS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnsatzKind {
    #[serde(rename = "RXYZ")]
    Rxyz,
    #[serde(rename = "RY")]
    Ry,
    #[serde(rename = "UCCSD")]
    Uccsd,
}

impl AnsatzKind {
    pub const ALL: [AnsatzKind; 3] = [AnsatzKind::Rxyz, AnsatzKind::Ry, AnsatzKind::Uccsd];

    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::Rxyz => "RXYZ",
            AnsatzKind::Ry => "RY",
            AnsatzKind::Uccsd => "UCCSD",
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RXYZ" => Ok(AnsatzKind::Rxyz),
            "RY" => Ok(AnsatzKind::Ry),
            "UCCSD" => Ok(AnsatzKind::Uccsd),
            _ => Err(Error::UnsupportedAnsatz {
                kind: s.to_string(),
                n_qubits: 0,
            }),
        }
    }
}

/// Axis of a parametrized rotation slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationAxis {
    X,
    Y,
    Z,
    Pauli(PauliString),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "slot", rename_all = "snake_case")]
pub enum Slot {
    Fixed {
        gate: GateOp,
    },
    /// Rotation whose angle is `scale · params[param_index]`.
    Param {
        axis: RotationAxis,
        qubits: Vec<usize>,
        param_index: usize,
        scale: f64,
    },
}

impl Slot {
    fn bind(&self, params: &[f64]) -> GateOp {
        match self {
            Slot::Fixed { gate } => gate.clone(),
            Slot::Param {
                axis,
                qubits,
                param_index,
                scale,
            } => {
                let angle = scale * params[*param_index];
                match axis {
                    RotationAxis::X => GateOp::rx(qubits[0], angle),
                    RotationAxis::Y => GateOp::ry(qubits[0], angle),
                    RotationAxis::Z => GateOp::rz(qubits[0], angle),
                    RotationAxis::Pauli(p) => GateOp::pauli_rotation(qubits.clone(), p.clone(), angle),
                }
            }
        }
    }
}

/// `U(θ)` acting on a fixed reference state prepared by `prep`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParametrizedCircuit {
    pub kind: AnsatzKind,
    pub n_qubits: usize,
    pub prep: Vec<GateOp>,
    pub template: Vec<Slot>,
    pub n_params: usize,
}

impl ParametrizedCircuit {
    /// Prep gates followed by the template with every angle bound.
    pub fn bind(&self, params: &[f64]) -> Result<Vec<GateOp>> {
        if params.len() != self.n_params {
            return Err(Error::ParamLength {
                expected: self.n_params,
                got: params.len(),
            });
        }
        let mut gates = self.prep.clone();
        gates.extend(self.template.iter().map(|s| s.bind(params)));
        Ok(gates)
    }

    /// Gate statistics of the hardware-level circuit (Pauli rotations expanded).
    pub fn gate_counts(&self) -> GateCounts {
        let bound = self
            .bind(&vec![0.5; self.n_params])
            .expect("own parameter count");
        GateCounts::of(&bound)
    }

    /// JSON-friendly description of the circuit structure.
    pub fn describe(&self) -> CircuitDescription {
        let mut gates: Vec<GateDescription> = self
            .prep
            .iter()
            .map(|g| GateDescription::fixed(g))
            .collect();
        for slot in &self.template {
            gates.push(match slot {
                Slot::Fixed { gate } => GateDescription::fixed(gate),
                Slot::Param {
                    axis,
                    qubits,
                    param_index,
                    scale,
                } => {
                    let (name, pauli) = match axis {
                        RotationAxis::X => ("RX", None),
                        RotationAxis::Y => ("RY", None),
                        RotationAxis::Z => ("RZ", None),
                        RotationAxis::Pauli(p) => ("PauliRotation", Some(p.to_string())),
                    };
                    GateDescription {
                        name: name.to_string(),
                        qubits: qubits.clone(),
                        param_index: Some(*param_index),
                        scale: Some(*scale),
                        pauli,
                    }
                }
            });
        }
        CircuitDescription {
            ansatz: self.kind,
            n_qubits: self.n_qubits,
            n_params: self.n_params,
            gate_counts: self.gate_counts(),
            gates,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateDescription {
    pub name: String,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pauli: Option<String>,
}

impl GateDescription {
    fn fixed(g: &GateOp) -> Self {
        Self {
            name: g.kind.name().to_string(),
            qubits: g.qubits.clone(),
            param_index: None,
            scale: None,
            pauli: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitDescription {
    pub ansatz: AnsatzKind,
    pub n_qubits: usize,
    pub n_params: usize,
    pub gate_counts: GateCounts,
    pub gates: Vec<GateDescription>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub one_qubit: usize,
    pub two_qubit: usize,
    pub depth: usize,
}

impl GateCounts {
    /// Counts after expanding Pauli rotations into their CNOT-staircase form.
    pub fn of(gates: &[GateOp]) -> Self {
        let expanded: Vec<GateOp> = gates.iter().flat_map(GateOp::decompose).collect();
        Self {
            one_qubit: expanded.iter().filter(|g| g.arity() == 1).count(),
            two_qubit: expanded.iter().filter(|g| g.arity() == 2).count(),
            depth: circuit_depth(&expanded),
        }
    }
}

/// X gates on qubits `0..n_electrons`, preparing `|1…10…0⟩`.
pub fn hartree_fock_prep(n_qubits: usize, n_electrons: usize) -> Result<Vec<GateOp>> {
    if n_electrons > n_qubits {
        return Err(Error::TooManyElectrons {
            n_electrons,
            n_qubits,
        });
    }
    Ok((0..n_electrons).map(GateOp::x).collect())
}

/// Builds an ansatz over the H₂ Hartree-Fock reference.
pub fn build_ansatz(kind: AnsatzKind, n_qubits: usize) -> Result<ParametrizedCircuit> {
    build_ansatz_with_reference(kind, n_qubits, H2_ELECTRONS)
}

pub fn build_ansatz_with_reference(
    kind: AnsatzKind,
    n_qubits: usize,
    n_electrons: usize,
) -> Result<ParametrizedCircuit> {
    let unsupported = || Error::UnsupportedAnsatz {
        kind: kind.name().to_string(),
        n_qubits,
    };
    let prep = hartree_fock_prep(n_qubits, n_electrons)?;
    let (template, n_params) = match kind {
        AnsatzKind::Rxyz | AnsatzKind::Ry => {
            if n_qubits < 2 {
                return Err(unsupported());
            }
            hardware_efficient(kind, n_qubits)
        }
        AnsatzKind::Uccsd => {
            if n_qubits != 4 || n_electrons != H2_ELECTRONS {
                return Err(unsupported());
            }
            uccsd_h2()
        }
    };
    Ok(ParametrizedCircuit {
        kind,
        n_qubits,
        prep,
        template,
        n_params,
    })
}

fn hardware_efficient(kind: AnsatzKind, n_qubits: usize) -> (Vec<Slot>, usize) {
    let axes: &[RotationAxis] = match kind {
        AnsatzKind::Rxyz => &[RotationAxis::X, RotationAxis::Y, RotationAxis::Z],
        _ => &[RotationAxis::Y],
    };
    let mut slots = Vec::new();
    let mut index = 0;
    for q in 0..n_qubits {
        for axis in axes {
            slots.push(Slot::Param {
                axis: axis.clone(),
                qubits: vec![q],
                param_index: index,
                scale: 1.0,
            });
            index += 1;
        }
    }
    for q in 0..n_qubits - 1 {
        slots.push(Slot::Fixed {
            gate: GateOp::cnot(q, q + 1),
        });
    }
    (slots, index)
}

/// First-order Trotterized `exp(t(T − T†))` for H₂ with `t = θ/2`.
///
/// Parameters: 0 = single 0→2, 1 = single 1→3, 2 = double (0,1)→(2,3). The double
/// acts first, then the singles, so every factor sees only states on which its
/// generator has eigenvalues ±1 and the energy is 2π-periodic in each parameter.
fn uccsd_h2() -> (Vec<Slot>, usize) {
    const DOUBLE: [(&str, f64); 8] = [
        // (i/8)·Σ s_k P_k = a₃†a₂†a₁a₀ − h.c. (up to overall sign), scale = −s_k/8
        ("YXXX", -1.0),
        ("XYXX", -1.0),
        ("XXYX", 1.0),
        ("XXXY", 1.0),
        ("YYYX", -1.0),
        ("YYXY", -1.0),
        ("YXYY", 1.0),
        ("XYYY", 1.0),
    ];
    let full = |s: &str| -> PauliString { s.parse().expect("static string") };
    let mut slots = Vec::new();
    for (s, sign) in DOUBLE {
        slots.push(Slot::Param {
            axis: RotationAxis::Pauli(full(s)),
            qubits: vec![0, 1, 2, 3],
            param_index: 2,
            scale: sign / 8.0,
        });
    }
    // a_r†a_p − h.c. = (i/2)·Z_mid·(X_r Y_p − Y_r X_p)
    for (index, (p, r)) in [(0usize, 2usize), (1, 3)].into_iter().enumerate() {
        let mid = (p + 1..r).map(|_| 'Z').collect::<String>();
        let yzx = format!("Y{mid}X");
        let xzy = format!("X{mid}Y");
        let qubits: Vec<usize> = (p..=r).collect();
        slots.push(Slot::Param {
            axis: RotationAxis::Pauli(full(&yzx)),
            qubits: qubits.clone(),
            param_index: index,
            scale: -0.5,
        });
        slots.push(Slot::Param {
            axis: RotationAxis::Pauli(full(&xzy)),
            qubits,
            param_index: index,
            scale: 0.5,
        });
    }
    (slots, 3)
}

/// Statevector of a bound circuit started from `|0…0⟩`.
pub fn prepare_state(circuit: &ParametrizedCircuit, params: &[f64]) -> Result<crate::sim::Statevector> {
    use crate::sim::QuantumState;
    let mut psi = crate::sim::Statevector::zero(circuit.n_qubits);
    psi.apply_gates(&circuit.bind(params)?)?;
    Ok(psi)
}

/// Number of rotation gates in a bound circuit.
pub fn count_rotations(gates: &[GateOp]) -> usize {
    gates.iter().filter(|g| g.kind.is_rotation()).count()
}
