//! Run configuration: parsing, validation and hashing.

use std::ops::Range;
use std::path::{Path, PathBuf};

use noisy_vqe::ansatz::AnsatzKind;
use noisy_vqe::experiment::{FitModel, InitMode, NoiseAxis, SweepConfig};
use noisy_vqe::{BackendConfig, NoiseModel, OptimizerConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    #[serde(rename = "EXACT_SPECTRUM")]
    ExactSpectrum,
    #[serde(rename = "VQE")]
    Vqe,
    #[serde(rename = "OPTIMIZER_BAKEOFF")]
    OptimizerBakeoff,
    #[serde(rename = "SWEEP")]
    Sweep,
    #[serde(rename = "RECALC")]
    Recalc,
    #[serde(rename = "FIT")]
    Fit,
    #[serde(rename = "SPLITTING")]
    Splitting,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::ExactSpectrum => "EXACT_SPECTRUM",
            Self::Vqe => "VQE",
            Self::OptimizerBakeoff => "OPTIMIZER_BAKEOFF",
            Self::Sweep => "SWEEP",
            Self::Recalc => "RECALC",
            Self::Fit => "FIT",
            Self::Splitting => "SPLITTING",
        }
    }

    fn required_sections(self) -> &'static [&'static str] {
        match self {
            Self::ExactSpectrum => &[],
            Self::Vqe | Self::Recalc => &["ansatz", "optimizer", "backend"],
            Self::OptimizerBakeoff => &["ansatz", "backend", "bakeoff"],
            Self::Sweep => &["ansatz", "optimizer", "sweep"],
            Self::Fit => &["fit"],
            Self::Splitting => &["splitting"],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSection {
    pub kind: AnsatzKind,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqeSection {
    #[serde(default)]
    pub seed: u64,
    /// Drawn from `seed` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub noise_axis: NoiseAxis,
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
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<Vec<f64>>,
    #[serde(default = "yes")]
    pub write_traces: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BakeoffSection {
    pub optimizers: Vec<OptimizerConfig>,
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    /// A `sweep.csv` written by a SWEEP run.
    pub input: PathBuf,
    #[serde(default = "default_models")]
    pub models: Vec<FitModel>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplittingSection {
    pub input: PathBuf,
    /// Intensity whose repetitions are clustered; the largest one when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensity: Option<f64>,
}

fn default_shots() -> u64 {
    noisy_vqe::estimator::DEFAULT_SHOTS
}

fn default_init_mode() -> InitMode {
    InitMode::Fixed
}

fn yes() -> bool {
    true
}

fn default_models() -> Vec<FitModel> {
    vec![FitModel::Linear, FitModel::Erf]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// JSON Hamiltonian file; H₂ when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ansatz: Option<AnsatzSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<BackendConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vqe: Option<VqeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bakeoff: Option<BakeoffSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<SplittingSection>,
}

/// A config problem with its 1-based source position.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: PathBuf,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}: {}", self.path.display(), self.line, self.column, self.message)
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

/// Offset of the first line mentioning `key` as a table header or key.
fn key_offset(src: &str, key: &str) -> Option<usize> {
    let mut offset = 0;
    for line in src.split_inclusive('\n') {
        let t = line.trim_start();
        let t = t.trim_start_matches('[').trim_start_matches('"');
        if t.starts_with(key) && t[key.len()..].trim_start().starts_with(['=', ']', '.', '"', ':']) {
            return Some(offset + line.len() - line.trim_start().len());
        }
        offset += line.len();
    }
    None
}

impl RunConfig {
    /// Parses TOML, or JSON when the file extension is `.json`.
    pub fn parse(src: &str, path: &Path) -> Result<Self, ConfigError> {
        let err_at = |span: Option<Range<usize>>, message: String| {
            let (line, column) = span.map_or((1, 1), |s| line_col(src, s.start));
            ConfigError {
                path: path.to_path_buf(),
                line,
                column,
                message,
            }
        };
        let cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(src).map_err(|e| {
                let message = e.to_string();
                let message = message.split(" at line ").next().unwrap_or(&message).to_string();
                ConfigError {
                    path: path.to_path_buf(),
                    line: e.line().max(1),
                    column: e.column().max(1),
                    message,
                }
            })?
        } else {
            toml::from_str(src).map_err(|e| err_at(e.span(), e.message().trim().to_string()))?
        };
        cfg.validate().map_err(|(key, message)| err_at(key.and_then(|k| key_offset(src, k)).map(|o| o..o), message))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let src = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: path.to_path_buf(),
            line: 1,
            column: 1,
            message: format!("cannot read config: {e}"),
        })?;
        Self::parse(&src, path)
    }

    fn section_present(&self, name: &str) -> bool {
        match name {
            "ansatz" => self.ansatz.is_some(),
            "optimizer" => self.optimizer.is_some(),
            "backend" => self.backend.is_some(),
            "sweep" => self.sweep.is_some(),
            "bakeoff" => self.bakeoff.is_some(),
            "fit" => self.fit.is_some(),
            "splitting" => self.splitting.is_some(),
            _ => false,
        }
    }

    /// Schema checks beyond deserialization; errors carry the offending key.
    pub fn validate(&self) -> Result<(), (Option<&'static str>, String)> {
        for s in self.experiment.required_sections() {
            if !self.section_present(s) {
                return Err((
                    Some("experiment"),
                    format!("experiment {} requires a [{s}] section", self.experiment.name()),
                ));
            }
        }
        if self.hamiltonian.is_some() && matches!(self.experiment, ExperimentKind::Sweep | ExperimentKind::Fit | ExperimentKind::Splitting) {
            return Err((
                Some("hamiltonian"),
                format!("experiment {} runs on the built-in H2 Hamiltonian only", self.experiment.name()),
            ));
        }
        if let Some(o) = &self.optimizer {
            o.validate().map_err(|e| (Some("optimizer"), e.to_string()))?;
        }
        if let Some(b) = &self.backend {
            b.validate().map_err(|e| (Some("backend"), e.to_string()))?;
        }
        if self.experiment == ExperimentKind::Sweep {
            self.sweep_config()
                .expect("sections checked")
                .validate()
                .map_err(|e| (Some("sweep"), e.to_string()))?;
        }
        if let Some(b) = &self.bakeoff {
            if b.optimizers.is_empty() {
                return Err((Some("bakeoff"), "bakeoff needs at least one optimizer".into()));
            }
            if b.repetitions == 0 {
                return Err((Some("bakeoff"), "repetitions must be at least 1".into()));
            }
            for o in &b.optimizers {
                o.validate().map_err(|e| (Some("bakeoff"), e.to_string()))?;
            }
        }
        if let Some(f) = &self.fit {
            if f.models.is_empty() {
                return Err((Some("fit"), "fit needs at least one model".into()));
            }
        }
        Ok(())
    }

    /// Core sweep configuration assembled from the ansatz, optimizer and sweep sections.
    pub fn sweep_config(&self) -> Option<SweepConfig> {
        let s = self.sweep.as_ref()?;
        Some(SweepConfig {
            ansatz: self.ansatz.as_ref()?.kind,
            optimizer: self.optimizer.clone()?,
            noise_axis: s.noise_axis,
            intensities: s.intensities.clone(),
            fixed_noise: s.fixed_noise,
            repetitions: s.repetitions,
            shots: s.shots,
            seed_base: s.seed_base,
            init_mode: s.init_mode,
            theta0: s.theta0.clone(),
        })
    }

    /// Replaces every seed root (sweep base, VQE seed, bakeoff seed).
    pub fn override_seed(&mut self, seed: u64) {
        if let Some(s) = &mut self.sweep {
            s.seed_base = seed;
        }
        if let Some(v) = &mut self.vqe {
            v.seed = seed;
        } else if matches!(self.experiment, ExperimentKind::Vqe | ExperimentKind::Recalc) {
            self.vqe = Some(VqeSection { seed, theta0: None });
        }
        if let Some(b) = &mut self.bakeoff {
            b.seed = seed;
        }
    }

    /// SHA-256 of the canonical JSON form (sorted keys, output directory excluded).
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        let value = serde_json::to_value(&c).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = r#"
experiment = "SWEEP"

[ansatz]
kind = "RY"

[optimizer]
max_iterations = 4
method = { kind = "NFT" }

[sweep]
noise_axis = "READOUT"
intensities = [0.0, 0.1]
repetitions = 2
shots = 64
"#;

    #[test]
    fn parses_sweep_toml() {
        let cfg = RunConfig::parse(SWEEP, Path::new("a.toml")).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Sweep);
        let s = cfg.sweep_config().unwrap();
        assert_eq!(s.ansatz, AnsatzKind::Ry);
        assert_eq!(s.grid(), vec![0.0, 0.1]);
    }

    #[test]
    fn unknown_key_is_line_anchored() {
        let src = SWEEP.replace("shots = 64", "shotz = 64");
        let e = RunConfig::parse(&src, Path::new("a.toml")).unwrap_err();
        assert!(e.message.contains("shotz"), "{e}");
        assert_eq!(e.line, 15);
    }

    #[test]
    fn missing_section_points_at_experiment() {
        let e = RunConfig::parse("\n\nexperiment = \"VQE\"\n", Path::new("a.toml")).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("[ansatz]"));
    }

    #[test]
    fn json_equivalent_hashes_equal() {
        let a = RunConfig::parse(SWEEP, Path::new("a.toml")).unwrap();
        let json = r#"{"sweep": {"shots": 64, "repetitions": 2, "intensities": [0.0, 0.1], "noise_axis": "READOUT"},
            "optimizer": {"method": {"kind": "NFT"}, "max_iterations": 4},
            "ansatz": {"kind": "RY"}, "experiment": "SWEEP", "output_dir": "elsewhere"}"#;
        let b = RunConfig::parse(json, Path::new("a.json")).unwrap();
        assert_eq!(a, RunConfig { output_dir: None, ..b.clone() });
        assert_eq!(a.hash(), b.hash());
        let mut c = b;
        c.override_seed(9);
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn json_errors_carry_position() {
        let e = RunConfig::parse("{\n  \"experiment\": \"VQE\",\n  \"bogus\": 1\n}", Path::new("a.json")).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("bogus"));
    }
}
