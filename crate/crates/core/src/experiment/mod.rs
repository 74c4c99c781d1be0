//! Drivers for single VQE runs, noise-intensity sweeps, noiseless recalculation
//! of traces, noise-energy curve fits and energy-level splitting detection.

mod fit;
mod splitting;
mod sweep;

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{build_ansatz, AnsatzKind, GateCounts, ParametrizedCircuit};
use crate::error::{Error, Result};
use crate::estimator::{BackendConfig, BackendMode, Estimator};
use crate::hamiltonian::{h2_hamiltonian, Hamiltonian};
use crate::noise::{attach_noise, ChannelCounts};
use crate::optimize::{minimize, sinusoid_residual, Method, NftFit, OptimizationTrace, OptimizerConfig};
use crate::seed::hash64;

pub use fit::{fit_noise_curve, FitModel, FitResult, LM_MAX_STEPS};
pub use splitting::{detect_level_splitting, LevelSplitting};
pub use sweep::{
    converging_theta0, histogram, run_noise_sweep, run_noise_sweep_with_workers, HistogramBin, InitMode, IntensityStats, NoiseAxis,
    SweepConfig, SweepResult, SweepRow, HISTOGRAM_BIN_WIDTH, HISTOGRAM_RANGE,
};

/// Residual bound above which NFT on UCCSD switches to the five-point fit.
pub const UCCSD_SINUSOID_TOL: f64 = 1e-6;

/// Uniform angles in `[0, 2π)`.
pub fn random_theta0(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen::<f64>() * TAU).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub ansatz: AnsatzKind,
    pub n_params: usize,
    pub optimizer: String,
    pub backend: BackendConfig,
    pub seed: u64,
    pub estimator_seed: u64,
    pub optimizer_seed: u64,
    pub gate_counts: GateCounts,
    pub channel_counts: ChannelCounts,
    /// Basis-change gates receive the same gate noise as the ansatz.
    pub noise_on_basis_change: bool,
    /// Largest single-coordinate sinusoid residual at `θ₀` (UCCSD with NFT only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sinusoid_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nft_fit: Option<NftFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeRun {
    pub trace: OptimizationTrace,
    pub metadata: RunMetadata,
}

fn max_sinusoid_residual(circuit: &ParametrizedCircuit, h: &Hamiltonian, theta: &[f64]) -> Result<f64> {
    let est = Estimator::new(circuit.clone(), h.clone(), BackendConfig::exact())?;
    let mut loss = |x: &[f64]| est.evaluate_at(x, 0).map(|e| e.value);
    let mut worst: f64 = 0.0;
    for j in 0..theta.len() {
        worst = worst.max(sinusoid_residual(&mut loss, theta, j)?);
    }
    Ok(worst)
}

/// Minimizes the H₂ energy estimate of `kind` from `theta0`.
///
/// The estimator sub-seed and the optimizer seed are derived from `seed`
/// (overriding those in `backend` and `optimizer`).
pub fn run_vqe(
    kind: AnsatzKind,
    optimizer: &OptimizerConfig,
    backend: &BackendConfig,
    theta0: &[f64],
    seed: u64,
) -> Result<VqeRun> {
    run_vqe_on(kind, &h2_hamiltonian(), optimizer, backend, theta0, seed)
}

pub fn run_vqe_on(
    kind: AnsatzKind,
    h: &Hamiltonian,
    optimizer: &OptimizerConfig,
    backend: &BackendConfig,
    theta0: &[f64],
    seed: u64,
) -> Result<VqeRun> {
    let circuit = build_ansatz(kind, h.n_qubits())?;
    if theta0.len() != circuit.n_params {
        return Err(Error::ParamLength {
            expected: circuit.n_params,
            got: theta0.len(),
        });
    }
    let estimator_seed = hash64(&[seed, 1]);
    let optimizer_seed = hash64(&[seed, 2]);
    let backend = backend.with_seed(estimator_seed);
    let mut opt = optimizer.clone().with_seed(optimizer_seed);

    let mut residual = None;
    let mut nft_fit = None;
    if let Method::Nft(c) = &mut opt.method {
        if kind == AnsatzKind::Uccsd {
            let r = max_sinusoid_residual(&circuit, h, theta0)?;
            if r > UCCSD_SINUSOID_TOL {
                c.fit = NftFit::LeastSquares;
            }
            residual = Some(r);
        }
        nft_fit = Some(c.fit);
    }

    let channel_counts = if backend.mode == BackendMode::Noisy {
        let n = circuit.n_qubits;
        attach_noise(&circuit.bind(theta0)?, &backend.noise_model(), n)?.channel_counts()
    } else {
        ChannelCounts::default()
    };
    let metadata = RunMetadata {
        ansatz: kind,
        n_params: circuit.n_params,
        optimizer: opt.method.name().to_string(),
        backend,
        seed,
        estimator_seed,
        optimizer_seed,
        gate_counts: circuit.gate_counts(),
        channel_counts,
        noise_on_basis_change: backend.mode == BackendMode::Noisy,
        sinusoid_residual: residual,
        nft_fit,
    };

    let mut est = Estimator::new(circuit, h.clone(), backend)?;
    let mut loss = |x: &[f64]| est.evaluate(x).map(|e| e.value);
    let trace = minimize(&mut loss, theta0, &opt)?;
    Ok(VqeRun { trace, metadata })
}

/// Exact energies at every recorded parameter vector, in record order.
pub fn recalculate_trace(trace: &OptimizationTrace, kind: AnsatzKind, h: &Hamiltonian) -> Result<Vec<(usize, f64)>> {
    let circuit = build_ansatz(kind, h.n_qubits())?;
    let est = Estimator::new(circuit, h.clone(), BackendConfig::exact())?;
    trace
        .records
        .iter()
        .map(|r| {
            if r.params.len() != est.circuit().n_params {
                return Err(Error::DimensionMismatch {
                    expected: est.circuit().n_params,
                    got: r.params.len(),
                });
            }
            Ok((r.iteration, est.evaluate_at(&r.params, 0)?.value))
        })
        .collect()
}

/// Sample mean and standard deviation (`n − 1` denominator, 0 for one sample).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    use statrs::statistics::Statistics;
    let mean = values.iter().mean();
    let std = if values.len() > 1 { values.iter().std_dev() } else { 0.0 };
    (mean, std)
}
