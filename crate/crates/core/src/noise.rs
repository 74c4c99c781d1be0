//! Kraus channels for readout, depolarizing, amplitude- and phase-damping noise,
//! decay probabilities from relaxation times, and the per-gate attachment policy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{apply_local, DensityMatrix, GateOp, KrausChannel, Matrix, Pauli, C64};

/// Noise intensities, all probabilities in `[0, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    pub p_readout: f64,
    pub p_dep1: f64,
    pub p_dep2: f64,
    pub p_amp: f64,
    pub p_phase: f64,
    pub epsilon: f64,
}

impl NoiseModel {
    /// No noise at all.
    pub fn ideal() -> Self {
        Self::default()
    }

    /// Typical superconducting-device rates.
    pub fn device_defaults() -> Self {
        Self {
            p_readout: 0.03,
            p_dep1: 0.001,
            p_dep2: 0.01,
            ..Self::default()
        }
    }

    pub fn readout(p: f64) -> Self {
        Self {
            p_readout: p,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("p_readout", self.p_readout),
            ("p_dep1", self.p_dep1),
            ("p_dep2", self.p_dep2),
            ("p_amp", self.p_amp),
            ("p_phase", self.p_phase),
            ("epsilon", self.epsilon),
        ] {
            check_probability(name, value)?;
        }
        Ok(())
    }

    /// True if no gate-level channel would be attached.
    pub fn gate_noise_free(&self) -> bool {
        self.p_dep1 == 0.0 && self.p_dep2 == 0.0 && self.p_amp == 0.0 && self.p_phase == 0.0
    }

    pub fn is_ideal(&self) -> bool {
        self.gate_noise_free() && self.p_readout == 0.0
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn pauli_ops(n: usize) -> Vec<Matrix> {
    let single = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    match n {
        1 => single.iter().map(|p| p.matrix()).collect(),
        _ => single
            .iter()
            .flat_map(|hi| single.iter().map(move |lo| hi.matrix().kron(&lo.matrix())))
            .collect(),
    }
}

/// Bit flip `{√(1−p) I, √p X}`.
pub fn readout_flip_channel(p: f64) -> Result<KrausChannel> {
    check_probability("p_readout", p)?;
    KrausChannel::new(
        1,
        vec![
            Pauli::I.matrix().scale(c((1.0 - p).sqrt())),
            Pauli::X.matrix().scale(c(p.sqrt())),
        ],
    )
}

/// Arity 1: `{√(1−p) I, √(p/3) X, √(p/3) Y, √(p/3) Z}`, so `⟨Z⟩` of `|0⟩` becomes
/// `1 − 4p/3`. Arity 2: `√(1−p) I⊗I` plus `√(p/15) P⊗Q` over the 15 non-identity pairs.
pub fn depolarizing_channel(arity: usize, p: f64) -> Result<KrausChannel> {
    if arity == 0 || arity > 2 {
        return Err(Error::InvalidArity(arity));
    }
    check_probability(if arity == 1 { "p_dep1" } else { "p_dep2" }, p)?;
    let others = ((1 << (2 * arity)) - 1) as f64;
    let ops = pauli_ops(arity)
        .into_iter()
        .enumerate()
        .map(|(k, m)| {
            let w = if k == 0 { 1.0 - p } else { p / others };
            m.scale(c(w.sqrt()))
        })
        .collect();
    KrausChannel::new(arity, ops)
}

/// Generalized amplitude damping with equilibrium excited population `epsilon`.
///
/// `E₀ = √(1−ε) diag(1, √(1−p))`, `E₁ = √(1−ε) √p |0⟩⟨1|`,
/// `E₂ = √ε diag(√(1−p), 1)`, `E₃ = √ε √p |1⟩⟨0|`. Operators with zero weight are
/// dropped, so `ε = 0` gives the usual two-operator set.
pub fn amplitude_damping_channel(p_a: f64, epsilon: f64) -> Result<KrausChannel> {
    check_probability("p_amp", p_a)?;
    check_probability("epsilon", epsilon)?;
    let g = (1.0 - epsilon).sqrt();
    let e = epsilon.sqrt();
    let s = p_a.sqrt();
    let r = (1.0 - p_a).sqrt();
    let mut ops = vec![
        Matrix::from_real(2, &[g, 0.0, 0.0, g * r]),
        Matrix::from_real(2, &[0.0, g * s, 0.0, 0.0]),
    ];
    if epsilon > 0.0 {
        ops.push(Matrix::from_real(2, &[e * r, 0.0, 0.0, e]));
        ops.push(Matrix::from_real(2, &[0.0, 0.0, e * s, 0.0]));
    }
    KrausChannel::new(1, ops)
}

/// `{diag(1, √(1−p)), diag(0, √p)}`.
pub fn phase_damping_channel(p_phi: f64) -> Result<KrausChannel> {
    check_probability("p_phase", p_phi)?;
    KrausChannel::new(
        1,
        vec![
            Matrix::from_real(2, &[1.0, 0.0, 0.0, (1.0 - p_phi).sqrt()]),
            Matrix::from_real(2, &[0.0, 0.0, 0.0, p_phi.sqrt()]),
        ],
    )
}

/// Relaxation times and gate duration in a common unit. `f64::INFINITY` is allowed
/// for either relaxation time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxationTimes {
    pub t1: f64,
    pub t_phi: f64,
    pub gate_time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayProbabilities {
    pub p_amp: f64,
    pub p_phase: f64,
    pub t2: f64,
}

/// `p_a = 1 − e^{−t/T₁}`, `p_φ = 1 − e^{−t/(2T_φ)}`, `1/T₂ = 1/(2T₁) + 1/T_φ`.
///
/// A zero gate time is accepted and gives zero probabilities.
pub fn decay_probabilities(times: RelaxationTimes) -> Result<DecayProbabilities> {
    for (name, value) in [("t1", times.t1), ("t_phi", times.t_phi)] {
        if !(value > 0.0) {
            return Err(Error::NonPositiveTime { name, value });
        }
    }
    if !(times.gate_time >= 0.0) || !times.gate_time.is_finite() {
        return Err(Error::NonPositiveTime {
            name: "gate_time",
            value: times.gate_time,
        });
    }
    let t = times.gate_time;
    Ok(DecayProbabilities {
        p_amp: 1.0 - (-t / times.t1).exp(),
        p_phase: 1.0 - (-t / (2.0 * times.t_phi)).exp(),
        t2: 1.0 / (1.0 / (2.0 * times.t1) + 1.0 / times.t_phi),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Depolarizing1,
    Depolarizing2,
    AmplitudeDamping,
    PhaseDamping,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum NoisyOp {
    Gate { gate: GateOp },
    Channel { kind: ChannelKind, qubits: Vec<usize> },
    /// Bit flip applied to the measured value of `qubit`.
    Readout { qubit: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelCounts {
    pub depolarizing1: usize,
    pub depolarizing2: usize,
    pub amplitude_damping: usize,
    pub phase_damping: usize,
    pub readout: usize,
}

/// Channels of one model, built once.
#[derive(Clone, Debug)]
struct ModelChannels {
    dep1: Option<KrausChannel>,
    dep2: Option<KrausChannel>,
    amp: Option<KrausChannel>,
    phase: Option<KrausChannel>,
}

impl ModelChannels {
    fn new(model: &NoiseModel) -> Result<Self> {
        let some = |p: f64, f: &dyn Fn() -> Result<KrausChannel>| -> Result<Option<KrausChannel>> {
            if p > 0.0 {
                f().map(Some)
            } else {
                Ok(None)
            }
        };
        Ok(Self {
            dep1: some(model.p_dep1, &|| depolarizing_channel(1, model.p_dep1))?,
            dep2: some(model.p_dep2, &|| depolarizing_channel(2, model.p_dep2))?,
            amp: some(model.p_amp, &|| amplitude_damping_channel(model.p_amp, model.epsilon))?,
            phase: some(model.p_phase, &|| phase_damping_channel(model.p_phase))?,
        })
    }

    fn get(&self, kind: ChannelKind) -> &KrausChannel {
        match kind {
            ChannelKind::Depolarizing1 => self.dep1.as_ref(),
            ChannelKind::Depolarizing2 => self.dep2.as_ref(),
            ChannelKind::AmplitudeDamping => self.amp.as_ref(),
            ChannelKind::PhaseDamping => self.phase.as_ref(),
        }
        .expect("only attached channels are referenced")
    }
}

/// A gate list interleaved with noise channels and readout markers.
#[derive(Clone, Debug)]
pub struct NoisyCircuit {
    model: NoiseModel,
    ops: Vec<NoisyOp>,
    channels: ModelChannels,
}

/// Inserts channels after every gate of `gates` and readout markers for the
/// qubits `0..n_measured` at the end.
///
/// Pauli rotations are first expanded into their hardware-level gates so that
/// every physical gate receives its own channels.
pub fn attach_noise(gates: &[GateOp], model: &NoiseModel, n_measured: usize) -> Result<NoisyCircuit> {
    let mut circuit = NoisyCircuit::empty(model)?;
    circuit.extend_gates(gates);
    if model.p_readout > 0.0 {
        circuit
            .ops
            .extend((0..n_measured).map(|qubit| NoisyOp::Readout { qubit }));
    }
    Ok(circuit)
}

impl NoisyCircuit {
    pub fn empty(model: &NoiseModel) -> Result<Self> {
        model.validate()?;
        Ok(Self {
            model: *model,
            ops: Vec::new(),
            channels: ModelChannels::new(model)?,
        })
    }

    /// Appends gates with the attachment policy, without readout markers.
    pub fn extend_gates(&mut self, gates: &[GateOp]) {
        let m = self.model;
        for gate in gates.iter().flat_map(GateOp::decompose) {
            let qubits = gate.qubits.clone();
            self.ops.push(NoisyOp::Gate { gate });
            if qubits.len() == 1 {
                if m.p_dep1 > 0.0 {
                    self.push_channel(ChannelKind::Depolarizing1, qubits.clone());
                }
            } else if m.p_dep2 > 0.0 {
                self.push_channel(ChannelKind::Depolarizing2, qubits.clone());
            }
            for &q in &qubits {
                if m.p_amp > 0.0 {
                    self.push_channel(ChannelKind::AmplitudeDamping, vec![q]);
                }
                if m.p_phase > 0.0 {
                    self.push_channel(ChannelKind::PhaseDamping, vec![q]);
                }
            }
        }
    }

    fn push_channel(&mut self, kind: ChannelKind, qubits: Vec<usize>) {
        self.ops.push(NoisyOp::Channel { kind, qubits });
    }

    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    pub fn ops(&self) -> &[NoisyOp] {
        &self.ops
    }

    pub fn channel(&self, kind: ChannelKind) -> &KrausChannel {
        self.channels.get(kind)
    }

    pub fn channel_counts(&self) -> ChannelCounts {
        let mut counts = ChannelCounts::default();
        for op in &self.ops {
            match op {
                NoisyOp::Gate { .. } => {}
                NoisyOp::Channel { kind, .. } => match kind {
                    ChannelKind::Depolarizing1 => counts.depolarizing1 += 1,
                    ChannelKind::Depolarizing2 => counts.depolarizing2 += 1,
                    ChannelKind::AmplitudeDamping => counts.amplitude_damping += 1,
                    ChannelKind::PhaseDamping => counts.phase_damping += 1,
                },
                NoisyOp::Readout { .. } => counts.readout += 1,
            }
        }
        counts
    }

    pub fn gates(&self) -> impl Iterator<Item = &GateOp> {
        self.ops.iter().filter_map(|op| match op {
            NoisyOp::Gate { gate } => Some(gate),
            _ => None,
        })
    }

    /// Qubits carrying a readout marker.
    pub fn readout_qubits(&self) -> Vec<usize> {
        self.ops
            .iter()
            .filter_map(|op| match op {
                NoisyOp::Readout { qubit } => Some(*qubit),
                _ => None,
            })
            .collect()
    }

    /// Applies gates and channels one at a time; readout markers are skipped
    /// because they act on classical measurement records.
    pub fn run(&self, rho: &mut DensityMatrix) -> Result<()> {
        use crate::sim::QuantumState;
        for op in &self.ops {
            match op {
                NoisyOp::Gate { gate } => rho.apply_gate(gate)?,
                NoisyOp::Channel { kind, qubits } => rho.apply_channel(self.channels.get(*kind), qubits)?,
                NoisyOp::Readout { .. } => {}
            }
        }
        Ok(())
    }

    /// Like [`run`](Self::run) but also folds the readout markers in as bit-flip
    /// channels, giving the exact pre-sampling state of the classical record.
    pub fn run_with_readout(&self, rho: &mut DensityMatrix) -> Result<()> {
        self.run(rho)?;
        let flip = readout_flip_channel(self.model.p_readout)?;
        for q in self.readout_qubits() {
            rho.apply_channel(&flip, &[q])?;
        }
        Ok(())
    }

    /// Merges consecutive operations into superoperator blocks.
    pub fn compile(&self, n_qubits: usize) -> Result<CompiledNoisyCircuit> {
        let mut blocks: Vec<SuperopBlock> = Vec::new();
        for op in &self.ops {
            let (superop, qubits) = match op {
                NoisyOp::Gate { gate } => {
                    gate.validate(n_qubits)?;
                    let u = gate.matrix().expect("decomposed gates have matrices");
                    (u.conj().kron(&u), gate.qubits.clone())
                }
                NoisyOp::Channel { kind, qubits } => {
                    for &q in qubits {
                        if q >= n_qubits {
                            return Err(Error::QubitOutOfRange { index: q, n_qubits });
                        }
                    }
                    (self.channels.get(*kind).superoperator().clone(), qubits.clone())
                }
                NoisyOp::Readout { .. } => continue,
            };
            match blocks.last_mut() {
                Some(last) if qubits.iter().all(|q| last.qubits.contains(q)) => last.absorb(&superop, &qubits),
                _ => blocks.push(SuperopBlock { superop, qubits }),
            }
        }
        Ok(CompiledNoisyCircuit { n_qubits, blocks })
    }
}

#[derive(Clone, Debug)]
struct SuperopBlock {
    superop: Matrix,
    qubits: Vec<usize>,
}

impl SuperopBlock {
    /// `S ← S_op · S` where `S_op` acts on a subset of the block's qubits.
    fn absorb(&mut self, op: &Matrix, op_qubits: &[usize]) {
        let k = self.qubits.len();
        let dim = self.superop.dim();
        // local sites of the block superop: rows 0..k, columns k..2k
        let pos = |q: &usize| self.qubits.iter().position(|b| b == q).expect("subset");
        let mut sites: Vec<usize> = op_qubits.iter().map(pos).collect();
        sites.extend(op_qubits.iter().map(|q| pos(q) + k));
        let mut column = vec![C64::new(0.0, 0.0); dim];
        let data = self.superop.data_mut();
        for j in 0..dim {
            for i in 0..dim {
                column[i] = data[i * dim + j];
            }
            apply_local(&mut column, op, &sites);
            for i in 0..dim {
                data[i * dim + j] = column[i];
            }
        }
    }
}

/// Noisy circuit reduced to a sequence of fused superoperators.
#[derive(Clone, Debug)]
pub struct CompiledNoisyCircuit {
    n_qubits: usize,
    blocks: Vec<SuperopBlock>,
}

impl CompiledNoisyCircuit {
    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn run(&self, rho: &mut DensityMatrix) -> Result<()> {
        use crate::sim::QuantumState;
        if rho.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: rho.n_qubits(),
            });
        }
        for b in &self.blocks {
            rho.apply_superop_unchecked(&b.superop, &b.qubits);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{QuantumState, Statevector};

    fn z_expectation(rho: &DensityMatrix) -> f64 {
        let p = rho.probabilities();
        p[0] - p[1]
    }

    #[test]
    fn depolarizing_z_expectation() {
        for p in [0.0, 0.1, 0.3, 0.75, 1.0] {
            let mut rho = DensityMatrix::zero(1);
            rho.apply_channel(&depolarizing_channel(1, p).unwrap(), &[0]).unwrap();
            assert!((z_expectation(&rho) - (1.0 - 4.0 * p / 3.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn full_depolarizing_point() {
        let mut psi = Statevector::zero(1);
        psi.apply_gate(&GateOp::ry(0, 0.7)).unwrap();
        psi.apply_gate(&GateOp::rz(0, 1.3)).unwrap();
        let mut rho = psi.to_density();
        rho.apply_channel(&depolarizing_channel(1, 0.75).unwrap(), &[0]).unwrap();
        assert!(rho.to_matrix().max_abs_diff(&DensityMatrix::maximally_mixed(1).to_matrix()) < 1e-14);
    }

    #[test]
    fn two_qubit_depolarizing_sizes() {
        let ch = depolarizing_channel(2, 0.2).unwrap();
        assert_eq!(ch.operators().len(), 16);
        assert!(ch.completeness_deviation() < 1e-14);
        assert!(depolarizing_channel(3, 0.1).is_err());
        assert!(depolarizing_channel(1, 1.5).is_err());
    }

    #[test]
    fn amplitude_damping_examples() {
        let mut rho = DensityMatrix::from_pure(&Statevector::basis(1, 1));
        rho.apply_channel(&amplitude_damping_channel(1.0, 0.0).unwrap(), &[0]).unwrap();
        assert!(rho.to_matrix().max_abs_diff(&DensityMatrix::zero(1).to_matrix()) < 1e-15);

        let mut plus = Statevector::zero(1);
        plus.apply_gate(&GateOp::h(0)).unwrap();
        let start = plus.to_density();
        let mut rho = start.clone();
        rho.apply_channel(&amplitude_damping_channel(0.0, 0.3).unwrap(), &[0]).unwrap();
        assert!(rho.to_matrix().max_abs_diff(&start.to_matrix()) < 1e-15);

        let mut rho = start.clone();
        rho.apply_channel(&amplitude_damping_channel(0.4, 0.0).unwrap(), &[0]).unwrap();
        assert!((rho.entry(1, 1).re - 0.6 * 0.5).abs() < 1e-15);
        assert_eq!(amplitude_damping_channel(0.4, 0.0).unwrap().operators().len(), 2);
    }

    #[test]
    fn phase_damping_examples() {
        let mut plus = Statevector::zero(1);
        plus.apply_gate(&GateOp::h(0)).unwrap();
        let mut rho = plus.to_density();
        rho.apply_channel(&phase_damping_channel(1.0).unwrap(), &[0]).unwrap();
        assert!(rho.to_matrix().max_abs_diff(&DensityMatrix::maximally_mixed(1).to_matrix()) < 1e-15);
        let mut rho = plus.to_density();
        rho.apply_channel(&phase_damping_channel(0.36).unwrap(), &[0]).unwrap();
        assert!((rho.entry(0, 1).re - 0.5 * 0.8).abs() < 1e-15);
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn readout_half_randomizes() {
        let mut rho = DensityMatrix::zero(1);
        rho.apply_channel(&readout_flip_channel(0.5).unwrap(), &[0]).unwrap();
        assert!(z_expectation(&rho).abs() < 1e-15);
        assert!(readout_flip_channel(-0.1).is_err());
    }

    #[test]
    fn decay_examples() {
        let d = decay_probabilities(RelaxationTimes {
            t1: 100.0,
            t_phi: 100.0,
            gate_time: 0.0,
        })
        .unwrap();
        assert_eq!((d.p_amp, d.p_phase), (0.0, 0.0));
        assert!((d.t2 - 200.0 / 3.0).abs() < 1e-12);
        let d = decay_probabilities(RelaxationTimes {
            t1: f64::INFINITY,
            t_phi: 50.0,
            gate_time: 1.0,
        })
        .unwrap();
        assert_eq!(d.p_amp, 0.0);
        assert!((d.p_phase - (1.0 - (-0.01f64).exp())).abs() < 1e-15);
        assert!((d.t2 - 50.0).abs() < 1e-12);
        assert!(decay_probabilities(RelaxationTimes {
            t1: 0.0,
            t_phi: 1.0,
            gate_time: 1.0
        })
        .is_err());
    }

    #[test]
    fn attach_counts() {
        let gates = vec![GateOp::x(0), GateOp::cnot(0, 1), GateOp::ry(1, 0.3)];
        let ideal = attach_noise(&gates, &NoiseModel::ideal(), 2).unwrap();
        assert_eq!(ideal.ops().len(), 3);
        let model = NoiseModel {
            p_readout: 0.1,
            p_dep1: 0.01,
            p_dep2: 0.02,
            p_amp: 0.03,
            p_phase: 0.04,
            epsilon: 0.0,
        };
        let noisy = attach_noise(&gates, &model, 2).unwrap();
        let counts = noisy.channel_counts();
        assert_eq!(counts.depolarizing1, 2);
        assert_eq!(counts.depolarizing2, 1);
        assert_eq!(counts.amplitude_damping, 4);
        assert_eq!(counts.phase_damping, 4);
        assert_eq!(counts.readout, 2);
        let tail: Vec<_> = noisy.ops().iter().rev().take(2).collect();
        assert!(tail.iter().all(|op| matches!(op, NoisyOp::Readout { .. })));
        // order after the CNOT: dep2 on the pair, then per-qubit damping
        assert_eq!(
            noisy.ops()[4],
            NoisyOp::Gate {
                gate: GateOp::cnot(0, 1)
            }
        );
        assert!(matches!(noisy.ops()[5], NoisyOp::Channel { kind: ChannelKind::Depolarizing2, .. }));
        assert!(matches!(noisy.ops()[6], NoisyOp::Channel { kind: ChannelKind::AmplitudeDamping, .. }));
        assert!(matches!(noisy.ops()[7], NoisyOp::Channel { kind: ChannelKind::PhaseDamping, .. }));
    }

    #[test]
    fn compiled_matches_stepwise() {
        let gates = vec![
            GateOp::x(0),
            GateOp::ry(1, 0.4),
            GateOp::cnot(0, 1),
            GateOp::rx(2, 1.1),
            GateOp::cnot(1, 2),
            GateOp::pauli_rotation(vec![0, 1, 2], "XZY".parse().unwrap(), 0.8),
        ];
        let model = NoiseModel {
            p_readout: 0.1,
            p_dep1: 0.02,
            p_dep2: 0.05,
            p_amp: 0.03,
            p_phase: 0.04,
            epsilon: 0.1,
        };
        let noisy = attach_noise(&gates, &model, 3).unwrap();
        let mut a = DensityMatrix::zero(3);
        noisy.run(&mut a).unwrap();
        let compiled = noisy.compile(3).unwrap();
        assert!(compiled.n_blocks() < noisy.ops().len());
        let mut b = DensityMatrix::zero(3);
        compiled.run(&mut b).unwrap();
        assert!(a.to_matrix().max_abs_diff(&b.to_matrix()) < 1e-13);
        assert!((a.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn model_json_fields() {
        let m = NoiseModel::device_defaults();
        let json = serde_json::to_value(m).unwrap();
        assert_eq!(json["p_readout"], 0.03);
        let back: NoiseModel = serde_json::from_value(json).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<NoiseModel>(r#"{"p_redout": 0.1}"#).is_err());
    }
}
