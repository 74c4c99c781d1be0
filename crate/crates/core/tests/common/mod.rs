//! Property checks shared by the proptest suite and the acceptance runner.
#![allow(dead_code)]

use noisy_vqe::ansatz::{build_ansatz, AnsatzKind};
use noisy_vqe::estimator::{BackendConfig, Estimator};
use noisy_vqe::experiment::random_theta0;
use noisy_vqe::hamiltonian::{expectation_exact, h2_hamiltonian};
use noisy_vqe::noise::{
    amplitude_damping_channel, depolarizing_channel, phase_damping_channel, readout_flip_channel, NoiseModel,
};
use noisy_vqe::optimize::{central_difference_gradient, nft_minimize, parameter_shift_gradient, NftConfig};
use noisy_vqe::sim::{DensityMatrix, GateOp, Pauli, PauliString, QuantumState, Statevector};
use rand::Rng;

pub type Check = Result<(), String>;

pub const N: usize = 4;

pub fn kraus_completeness(p: f64, eps: f64) -> Check {
    let channels = [
        ("readout", readout_flip_channel(p)),
        ("dep1", depolarizing_channel(1, p)),
        ("dep2", depolarizing_channel(2, p)),
        ("amp", amplitude_damping_channel(p, 0.0)),
        ("amp_eps", amplitude_damping_channel(p, eps)),
        ("phase", phase_damping_channel(p)),
    ];
    for (name, ch) in channels {
        let ch = ch.map_err(|e| format!("{name}({p}): {e}"))?;
        let dev = ch.completeness_deviation();
        if dev >= 1e-12 {
            return Err(format!("{name}({p}) completeness deviation {dev:e}"));
        }
    }
    Ok(())
}

pub fn random_gate<R: Rng>(rng: &mut R) -> GateOp {
    let q = rng.gen_range(0..N);
    let a = rng.gen_range(-std::f64::consts::TAU..std::f64::consts::TAU);
    match rng.gen_range(0..11) {
        0 => GateOp::x(q),
        1 => GateOp::y(q),
        2 => GateOp::z(q),
        3 => GateOp::h(q),
        4 => GateOp::s(q),
        5 => GateOp::sdg(q),
        6 => GateOp::rx(q, a),
        7 => GateOp::ry(q, a),
        8 => GateOp::rz(q, a),
        9 => GateOp::cnot(q, (q + rng.gen_range(1..N)) % N),
        _ => {
            let mut paulis: Vec<Pauli> = (0..N)
                .map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)])
                .collect();
            if paulis.iter().all(|p| *p == Pauli::I) {
                paulis[0] = Pauli::X;
            }
            GateOp::pauli_rotation((0..N).collect(), PauliString::new(paulis), a)
        }
    }
}

pub fn statevector_density_equivalence(gates: &[GateOp]) -> Check {
    let mut psi = Statevector::zero(N);
    psi.apply_gates(gates).map_err(|e| e.to_string())?;
    let mut rho = DensityMatrix::zero(N);
    rho.apply_gates(gates).map_err(|e| e.to_string())?;
    let pure = psi.to_density();
    for r in 0..rho.dim() {
        for c in 0..rho.dim() {
            let gap = (pure.entry(r, c) - rho.entry(r, c)).norm();
            if gap >= 1e-10 {
                return Err(format!("entry ({r},{c}) differs by {gap:e}"));
            }
        }
    }
    let h = h2_hamiltonian();
    let a = expectation_exact(&psi, &h).map_err(|e| e.to_string())?;
    let b = expectation_exact(&rho, &h).map_err(|e| e.to_string())?;
    if (a - b).abs() >= 1e-10 {
        return Err(format!("energies {a} vs {b}"));
    }
    Ok(())
}

pub fn gradient_agreement(kind: AnsatzKind, seed: u64) -> Check {
    let circuit = build_ansatz(kind, N).map_err(|e| e.to_string())?;
    let theta = random_theta0(circuit.n_params, seed);
    let est = Estimator::new(circuit, h2_hamiltonian(), BackendConfig::exact()).map_err(|e| e.to_string())?;
    let mut loss = |x: &[f64]| est.evaluate_at(x, 0).map(|e| e.value);
    let ps = parameter_shift_gradient(&mut loss, &theta).map_err(|e| e.to_string())?;
    let fd = central_difference_gradient(&mut loss, &theta, 1e-5).map_err(|e| e.to_string())?;
    for (j, (a, b)) in ps.iter().zip(&fd).enumerate() {
        if (a - b).abs() >= 1e-6 {
            return Err(format!("{kind} coordinate {j}: shift {a} vs finite difference {b}"));
        }
    }
    Ok(())
}

pub fn nft_one_step(a: f64, b: f64, c: f64, x0: f64) -> Check {
    let mut f = |x: &[f64]| Ok(a * (x[0] - b).cos() + c);
    let t = nft_minimize(&mut f, &[x0], &NftConfig::default(), 1, None, 0).map_err(|e| e.to_string())?;
    let at_final = a * (t.final_params[0] - b).cos() + c;
    if (t.final_energy() - (c - a)).abs() >= 1e-10 || (at_final - (c - a)).abs() >= 1e-10 {
        return Err(format!(
            "a={a} b={b} c={c}: recorded {} true {at_final} minimum {}",
            t.final_energy(),
            c - a
        ));
    }
    Ok(())
}

/// Mean of `m` sampled estimates lies within 4σ/√m of the exact expectation.
pub fn sampled_unbiased(seed: u64, p_readout: f64, m: u64) -> Check {
    let circuit = build_ansatz(AnsatzKind::Rxyz, N).map_err(|e| e.to_string())?;
    let theta = random_theta0(circuit.n_params, seed);
    for backend in [
        BackendConfig::shots(128, seed),
        BackendConfig::noisy(NoiseModel::readout(p_readout), 128, seed),
    ] {
        let est = Estimator::new(circuit.clone(), h2_hamiltonian(), backend).map_err(|e| e.to_string())?;
        let exact = est.expected_value(&theta).map_err(|e| e.to_string())?;
        let samples = (0..m)
            .map(|k| est.evaluate_at(&theta, k).map(|e| e.value))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| e.to_string())?;
        let mean = samples.iter().sum::<f64>() / m as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        let bound = 4.0 * var.sqrt() / (m as f64).sqrt();
        if (mean - exact).abs() > bound {
            return Err(format!("{:?}: mean {mean} vs exact {exact}, bound {bound:e}", backend.mode));
        }
    }
    Ok(())
}
