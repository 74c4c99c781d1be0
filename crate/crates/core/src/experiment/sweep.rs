use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mean_std, random_theta0, run_vqe, VqeRun};
use crate::ansatz::{build_ansatz, AnsatzKind};
use crate::error::{Error, Result};
use crate::estimator::BackendConfig;
use crate::hamiltonian::{exact_spectrum, h2_hamiltonian};
use crate::CHEMICAL_ACCURACY;
use crate::noise::NoiseModel;
use crate::optimize::{OptimizationTrace, OptimizerConfig};
use crate::seed::hash64;

pub const HISTOGRAM_BIN_WIDTH: f64 = 0.01;
pub const HISTOGRAM_RANGE: (f64, f64) = (-1.25, -0.35);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseAxis {
    #[serde(rename = "READOUT")]
    Readout,
    #[serde(rename = "DEP1")]
    Dep1,
    #[serde(rename = "DEP2")]
    Dep2,
    #[serde(rename = "AMP")]
    Amp,
    #[serde(rename = "PHASE")]
    Phase,
    #[serde(rename = "SHOTS")]
    Shots,
}

impl NoiseAxis {
    pub const NOISE: [NoiseAxis; 5] = [Self::Readout, Self::Dep1, Self::Dep2, Self::Amp, Self::Phase];

    pub fn name(self) -> &'static str {
        match self {
            Self::Readout => "READOUT",
            Self::Dep1 => "DEP1",
            Self::Dep2 => "DEP2",
            Self::Amp => "AMP",
            Self::Phase => "PHASE",
            Self::Shots => "SHOTS",
        }
    }

    pub fn default_grid(self) -> Vec<f64> {
        match self {
            Self::Readout => vec![0.0, 0.01, 0.02, 0.03, 0.05, 0.1, 0.2, 0.3],
            Self::Dep1 => vec![0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2],
            Self::Dep2 => vec![0.0, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.2],
            Self::Amp | Self::Phase => vec![0.0, 1e-3, 3e-3, 1e-2, 3e-2, 0.08, 0.1],
            Self::Shots => vec![256.0, 1024.0, 4096.0, 16384.0],
        }
    }

    /// `base` with this axis set to `intensity`; SHOTS leaves the model unchanged.
    pub fn apply(self, base: &NoiseModel, intensity: f64) -> NoiseModel {
        let mut m = *base;
        match self {
            Self::Readout => m.p_readout = intensity,
            Self::Dep1 => m.p_dep1 = intensity,
            Self::Dep2 => m.p_dep2 = intensity,
            Self::Amp => m.p_amp = intensity,
            Self::Phase => m.p_phase = intensity,
            Self::Shots => {}
        }
        m
    }
}

impl std::fmt::Display for NoiseAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitMode {
    /// One `θ₀` shared by every cell.
    #[serde(rename = "FIXED")]
    Fixed,
    /// A fresh `θ₀` per repetition index, shared across intensities.
    #[serde(rename = "RANDOM")]
    Random,
    /// One shared `θ₀`: the first seeded random start whose noiseless run with
    /// the sweep's optimizer ends within chemical accuracy.
    #[serde(rename = "CONVERGED")]
    Converged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub ansatz: AnsatzKind,
    pub optimizer: OptimizerConfig,
    pub noise_axis: NoiseAxis,
    /// Probabilities, or shot counts for the SHOTS axis. Empty selects the default grid.
    #[serde(default)]
    pub intensities: Vec<f64>,
    #[serde(default)]
    pub fixed_noise: NoiseModel,
    pub repetitions: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "default_init_mode")]
    pub init_mode: InitMode,
    /// Explicit `θ₀` for FIXED mode; drawn from `seed_base` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<Vec<f64>>,
}

fn default_shots() -> u64 {
    crate::estimator::DEFAULT_SHOTS
}

fn default_init_mode() -> InitMode {
    InitMode::Fixed
}

impl SweepConfig {
    pub fn new(ansatz: AnsatzKind, optimizer: OptimizerConfig, noise_axis: NoiseAxis, repetitions: usize) -> Self {
        Self {
            ansatz,
            optimizer,
            noise_axis,
            intensities: noise_axis.default_grid(),
            fixed_noise: NoiseModel::ideal(),
            repetitions,
            shots: default_shots(),
            seed_base: 0,
            init_mode: InitMode::Fixed,
            theta0: None,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        if self.intensities.is_empty() {
            self.noise_axis.default_grid()
        } else {
            self.intensities.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid();
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSweep("intensities must be strictly increasing".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidSweep("repetitions must be at least 1".into()));
        }
        if self.noise_axis == NoiseAxis::Shots {
            if grid.iter().any(|&s| !(s >= 1.0 && s.fract() == 0.0)) {
                return Err(Error::InvalidSweep("shot counts must be positive integers".into()));
            }
        } else if self.shots == 0 {
            return Err(Error::ZeroShots);
        }
        for &x in &grid {
            self.noise_axis.apply(&self.fixed_noise, x).validate()?;
        }
        self.fixed_noise.validate()?;
        self.optimizer.validate()?;
        if let Some(t) = &self.theta0 {
            let n = build_ansatz(self.ansatz, h2_hamiltonian().n_qubits())?.n_params;
            if t.len() != n {
                return Err(Error::ParamLength {
                    expected: n,
                    got: t.len(),
                });
            }
        }
        Ok(())
    }

    pub fn backend(&self, intensity: f64, seed: u64) -> BackendConfig {
        let model = self.noise_axis.apply(&self.fixed_noise, intensity);
        let shots = match self.noise_axis {
            NoiseAxis::Shots => intensity as u64,
            _ => self.shots,
        };
        BackendConfig::noisy(model, shots, seed)
    }

    pub fn cell_seed(&self, intensity_index: usize, repetition: usize) -> u64 {
        hash64(&[self.seed_base, intensity_index as u64, repetition as u64])
    }

    /// Initial parameters for every repetition.
    pub fn initial_points(&self) -> Result<Vec<Vec<f64>>> {
        if let Some(t) = &self.theta0 {
            return Ok(vec![t.clone(); self.repetitions]);
        }
        let n = build_ansatz(self.ansatz, h2_hamiltonian().n_qubits())?.n_params;
        Ok(match self.init_mode {
            InitMode::Fixed => vec![random_theta0(n, hash64(&[self.seed_base, u64::MAX])); self.repetitions],
            InitMode::Random => (0..self.repetitions)
                .map(|r| random_theta0(n, hash64(&[self.seed_base, u64::MAX, r as u64])))
                .collect(),
            InitMode::Converged => vec![converging_theta0(self.ansatz, &self.optimizer, self.seed_base)?; self.repetitions],
        })
    }
}

const CONVERGING_ATTEMPTS: u64 = 1000;

/// First start `random_theta0(n, hash64([seed, u64::MAX − 1, k]))`, k = 0, 1, …,
/// whose EXACT-backend run ends within chemical accuracy of the ground energy.
pub fn converging_theta0(kind: AnsatzKind, optimizer: &OptimizerConfig, seed: u64) -> Result<Vec<f64>> {
    let h = h2_hamiltonian();
    let ground = exact_spectrum(&h)?[0];
    let n = build_ansatz(kind, h.n_qubits())?.n_params;
    for k in 0..CONVERGING_ATTEMPTS {
        let theta0 = random_theta0(n, hash64(&[seed, u64::MAX - 1, k]));
        let run = run_vqe(kind, optimizer, &BackendConfig::exact(), &theta0, k)?;
        if (run.trace.final_energy() - ground).abs() < CHEMICAL_ACCURACY {
            return Ok(theta0);
        }
    }
    Err(Error::InvalidSweep(format!(
        "no converging start among {CONVERGING_ATTEMPTS} attempts"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub intensity: f64,
    pub intensity_index: usize,
    pub repetition: usize,
    pub seed: u64,
    /// Energy of the last trace record.
    pub final_energy: f64,
    pub best_energy: f64,
    pub final_params: Vec<f64>,
    #[serde(skip)]
    pub trace: Option<OptimizationTrace>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub index: usize,
    pub count: usize,
}

impl HistogramBin {
    pub fn lower(&self) -> f64 {
        HISTOGRAM_RANGE.0 + self.index as f64 * HISTOGRAM_BIN_WIDTH
    }
}

/// Fixed-width bins over [`HISTOGRAM_RANGE`]; empty bins and out-of-range values omitted.
pub fn histogram(values: &[f64]) -> Vec<HistogramBin> {
    let n_bins = ((HISTOGRAM_RANGE.1 - HISTOGRAM_RANGE.0) / HISTOGRAM_BIN_WIDTH).round() as usize;
    let mut counts = vec![0usize; n_bins];
    for &v in values {
        let x = (v - HISTOGRAM_RANGE.0) / HISTOGRAM_BIN_WIDTH;
        if x >= 0.0 && x < n_bins as f64 {
            counts[x as usize] += 1;
        }
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(index, count)| HistogramBin { index, count })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntensityStats {
    pub intensity: f64,
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub histogram: Vec<HistogramBin>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: NoiseAxis,
    pub ansatz: AnsatzKind,
    pub rows: Vec<SweepRow>,
    pub stats: Vec<IntensityStats>,
}

impl SweepResult {
    /// Groups rows by intensity in order of first appearance.
    pub fn from_rows(axis: NoiseAxis, ansatz: AnsatzKind, rows: Vec<SweepRow>) -> Self {
        let mut stats: Vec<IntensityStats> = Vec::new();
        let mut seen: Vec<f64> = Vec::new();
        for r in &rows {
            if !seen.contains(&r.intensity) {
                seen.push(r.intensity);
            }
        }
        for x in seen {
            let values: Vec<f64> = rows.iter().filter(|r| r.intensity == x).map(|r| r.final_energy).collect();
            let (mean, std) = mean_std(&values);
            stats.push(IntensityStats {
                intensity: x,
                count: values.len(),
                mean,
                std,
                histogram: histogram(&values),
            });
        }
        Self {
            axis,
            ansatz,
            rows,
            stats,
        }
    }

    /// `(intensity, mean, std)` triples for curve fitting.
    pub fn curve(&self) -> Vec<(f64, f64, f64)> {
        self.stats.iter().map(|s| (s.intensity, s.mean, s.std)).collect()
    }

    pub fn energies_at(&self, intensity_index: usize) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.intensity_index == intensity_index)
            .map(|r| r.final_energy)
            .collect()
    }
}

fn run_cell(cfg: &SweepConfig, grid: &[f64], theta0: &[f64], i: usize, rep: usize) -> Result<SweepRow> {
    let seed = cfg.cell_seed(i, rep);
    let backend = cfg.backend(grid[i], seed);
    let VqeRun { trace, .. } = run_vqe(cfg.ansatz, &cfg.optimizer, &backend, theta0, seed)?;
    Ok(SweepRow {
        intensity: grid[i],
        intensity_index: i,
        repetition: rep,
        seed,
        final_energy: trace.final_energy(),
        best_energy: trace.best_energy,
        final_params: trace.final_params.clone(),
        trace: Some(trace),
    })
}

/// Runs every (intensity, repetition) cell on the global rayon pool.
pub fn run_noise_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let grid = cfg.grid();
    let starts = cfg.initial_points()?;
    let cells: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|i| (0..cfg.repetitions).map(move |r| (i, r)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(i, r)| run_cell(cfg, &grid, &starts[r], i, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_rows(cfg.noise_axis, cfg.ansatz, rows))
}

/// As [`run_noise_sweep`] on a dedicated pool of `workers` threads.
pub fn run_noise_sweep_with_workers(cfg: &SweepConfig, workers: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    pool.install(|| run_noise_sweep(cfg))
}
