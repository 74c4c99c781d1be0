//! `run`: executes one configured experiment and writes its artifacts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use noisy_vqe::ansatz::{build_ansatz, AnsatzKind};
use noisy_vqe::experiment::{
    detect_level_splitting, fit_noise_curve, random_theta0, recalculate_trace, run_noise_sweep_with_workers, run_vqe_on,
    FitModel, FitResult, IntensityStats, LevelSplitting, NoiseAxis, RunMetadata, SweepResult, SweepRow, VqeRun,
};
use noisy_vqe::hamiltonian::{exact_spectrum, h2_hamiltonian, Hamiltonian, H2_GROUND_ENERGY};
use noisy_vqe::optimize::Termination;
use noisy_vqe::seed::hash64;
use noisy_vqe::{estimate_energy, BackendConfig, OptimizationTrace, CHEMICAL_ACCURACY};
use serde::{Deserialize, Serialize};

use crate::artifacts::{
    read_sweep_csv, ArtifactWriter, BakeoffRow, RecalcRow, BAKEOFF_CSV, CIRCUIT_JSON, METADATA_JSON, SUMMARY_JSON,
    TRACE_CSV,
};
use crate::config::{ExperimentKind, RunConfig};
use crate::report::intensity_stats;
use crate::svg::table;

pub struct RunOptions {
    pub output_dir: PathBuf,
    pub workers: usize,
    pub dump_circuit: bool,
    pub verbose: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub noisy_vqe: String,
    pub noisy_vqe_cli: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: ExperimentKind,
    pub config_hash: String,
    pub config: RunConfig,
    pub seeds: BTreeMap<String, u64>,
    pub versions: Versions,
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<RunMetadata>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub n_qubits: usize,
    pub ground_energy: f64,
    pub spectrum: Vec<f64>,
    pub reference_energy: f64,
    pub reference_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeSummary {
    pub ansatz: AnsatzKind,
    pub optimizer: String,
    pub theta0: Vec<f64>,
    pub final_energy: f64,
    pub best_energy: f64,
    pub final_params: Vec<f64>,
    pub best_params: Vec<f64>,
    pub total_evals: usize,
    pub terminated_by: Termination,
    pub exact_ground_energy: f64,
    /// Exact energy at the final parameters; present for RECALC runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recalculated_final_energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub within_chemical_accuracy: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOutcome {
    pub model: FitModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<FitResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub axis: NoiseAxis,
    pub ansatz: AnsatzKind,
    pub stats: Vec<IntensityStats>,
    pub fits: Vec<FitOutcome>,
    /// Directory holding one trace CSV per cell, named by config hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_dir: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub input: PathBuf,
    pub points: Vec<(f64, f64, f64)>,
    pub fits: Vec<FitOutcome>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingSummary {
    pub input: PathBuf,
    pub intensity: f64,
    pub samples: usize,
    pub splitting: LevelSplitting,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerStats {
    pub optimizer: String,
    pub mean_final_energy: f64,
    pub std_final_energy: f64,
    pub min_final_energy: f64,
    pub mean_evals: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BakeoffSummary {
    pub ansatz: AnsatzKind,
    pub repetitions: usize,
    pub optimizers: Vec<OptimizerStats>,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn load_hamiltonian(cfg: &RunConfig) -> Result<Hamiltonian, String> {
    match &cfg.hamiltonian {
        None => Ok(h2_hamiltonian()),
        Some(p) => {
            let src = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Hamiltonian::from_json(&src).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn fit_all(points: &[(f64, f64, f64)], models: &[FitModel]) -> Vec<FitOutcome> {
    models
        .iter()
        .map(|&model| match fit_noise_curve(points, model) {
            Ok(r) => FitOutcome {
                model,
                result: Some(r),
                error: None,
            },
            Err(e) => FitOutcome {
                model,
                result: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

struct Context<'a> {
    cfg: &'a RunConfig,
    opts: &'a RunOptions,
    out: ArtifactWriter,
    seeds: BTreeMap<String, u64>,
    runs: Vec<RunMetadata>,
}

impl Context<'_> {
    fn ansatz(&self) -> AnsatzKind {
        self.cfg.ansatz.as_ref().expect("validated").kind
    }

    fn backend(&self) -> BackendConfig {
        self.cfg.backend.expect("validated")
    }

    fn log(&self, msg: &str) {
        if self.opts.verbose {
            eprintln!("{msg}");
        }
    }
}

/// Runs the experiment; the error string is a runtime failure.
pub fn cmd_run(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>, String> {
    let mut cx = Context {
        cfg,
        opts,
        out: ArtifactWriter::create(&opts.output_dir)?,
        seeds: BTreeMap::new(),
        runs: Vec::new(),
    };
    if opts.dump_circuit {
        if let Some(a) = &cfg.ansatz {
            let n = load_hamiltonian(cfg)?.n_qubits();
            let desc = build_ansatz(a.kind, n).map_err(err)?.describe();
            println!("{}", serde_json::to_string_pretty(&desc).map_err(err)?);
            cx.out.json(CIRCUIT_JSON, &desc)?;
        }
    }
    match cfg.experiment {
        ExperimentKind::ExactSpectrum => exact(&mut cx)?,
        ExperimentKind::Vqe => vqe(&mut cx, false)?,
        ExperimentKind::Recalc => vqe(&mut cx, true)?,
        ExperimentKind::OptimizerBakeoff => bakeoff(&mut cx)?,
        ExperimentKind::Sweep => sweep(&mut cx)?,
        ExperimentKind::Fit => fit(&mut cx)?,
        ExperimentKind::Splitting => splitting(&mut cx)?,
    }
    let meta = Metadata {
        experiment: cfg.experiment,
        config_hash: cfg.hash(),
        config: cfg.clone(),
        seeds: std::mem::take(&mut cx.seeds),
        versions: Versions {
            noisy_vqe: noisy_vqe::VERSION.into(),
            noisy_vqe_cli: env!("CARGO_PKG_VERSION").into(),
        },
        workers: opts.workers,
        runs: std::mem::take(&mut cx.runs),
    };
    cx.out.json(METADATA_JSON, &meta)?;
    Ok(cx.out.written().to_vec())
}

fn exact(cx: &mut Context) -> Result<(), String> {
    let h = load_hamiltonian(cx.cfg)?;
    let spectrum = exact_spectrum(&h).map_err(err)?;
    let summary = SpectrumSummary {
        n_qubits: h.n_qubits(),
        ground_energy: spectrum[0],
        reference_energy: H2_GROUND_ENERGY,
        reference_gap: spectrum[0] - H2_GROUND_ENERGY,
        spectrum,
    };
    println!("ground energy {:.12} Ha", summary.ground_energy);
    cx.out.json(SUMMARY_JSON, &summary)
}

fn vqe(cx: &mut Context, recalc: bool) -> Result<(), String> {
    let h = load_hamiltonian(cx.cfg)?;
    let kind = cx.ansatz();
    let backend = cx.backend();
    let optimizer = cx.cfg.optimizer.clone().expect("validated");
    let section = cx.cfg.vqe.clone().unwrap_or_default();
    let circuit = build_ansatz(kind, h.n_qubits()).map_err(err)?;
    let theta0 = section
        .theta0
        .clone()
        .unwrap_or_else(|| random_theta0(circuit.n_params, hash64(&[section.seed, u64::MAX])));
    cx.seeds.insert("seed".into(), section.seed);
    let VqeRun { trace, metadata } = run_vqe_on(kind, &h, &optimizer, &backend, &theta0, section.seed).map_err(err)?;
    let ground = exact_spectrum(&h).map_err(err)?[0];
    cx.log(&format!(
        "{} {}: final {:.9} best {:.9} after {} evaluations",
        kind,
        metadata.optimizer,
        trace.final_energy(),
        trace.best_energy,
        trace.total_evals()
    ));
    if cx.opts.verbose {
        let est = estimate_energy(&circuit, &trace.final_params, &h, &metadata.backend).map_err(err)?;
        let rows: Vec<Vec<String>> = est
            .per_term
            .iter()
            .map(|t| vec![t.term.paulis.to_string(), format!("{:.6}", t.term.coeff), format!("{:.6}", t.estimate)])
            .collect();
        eprint!("{}", table(&["term", "coeff", "estimate"], &rows));
        eprintln!("energy estimate at final parameters: {:.9}", est.value);
    }
    let mut summary = VqeSummary {
        ansatz: kind,
        optimizer: metadata.optimizer.clone(),
        theta0,
        final_energy: trace.final_energy(),
        best_energy: trace.best_energy,
        final_params: trace.final_params.clone(),
        best_params: trace.best_params.clone(),
        total_evals: trace.total_evals(),
        terminated_by: trace.terminated_by,
        exact_ground_energy: ground,
        recalculated_final_energy: None,
        within_chemical_accuracy: None,
    };
    if recalc {
        let exact = recalculate_trace(&trace, kind, &h).map_err(err)?;
        let rows: Vec<RecalcRow> = trace
            .records
            .iter()
            .zip(&exact)
            .map(|(r, &(iteration, e))| RecalcRow {
                iteration,
                recorded_energy: r.energy,
                exact_energy: e,
            })
            .collect();
        let last = rows.last().map_or(f64::NAN, |r| r.exact_energy);
        summary.recalculated_final_energy = Some(last);
        summary.within_chemical_accuracy = Some((last - ground).abs() < CHEMICAL_ACCURACY);
        cx.out.recalc(&rows)?;
    }
    cx.out.trace(TRACE_CSV, &trace)?;
    cx.out.json(SUMMARY_JSON, &summary)?;
    cx.runs.push(metadata);
    Ok(())
}

fn bakeoff(cx: &mut Context) -> Result<(), String> {
    let h = load_hamiltonian(cx.cfg)?;
    let kind = cx.ansatz();
    let backend = cx.backend();
    let b = cx.cfg.bakeoff.clone().expect("validated");
    let n = build_ansatz(kind, h.n_qubits()).map_err(err)?.n_params;
    cx.seeds.insert("seed".into(), b.seed);
    let mut rows = Vec::new();
    let mut traces: Vec<(String, OptimizationTrace)> = Vec::new();
    for r in 0..b.repetitions {
        let theta0 = random_theta0(n, hash64(&[b.seed, u64::MAX, r as u64]));
        for (k, opt) in b.optimizers.iter().enumerate() {
            let seed = hash64(&[b.seed, k as u64, r as u64]);
            let run = run_vqe_on(kind, &h, opt, &backend, &theta0, seed).map_err(err)?;
            let name = opt.method.name().to_string();
            cx.log(&format!("{name} #{k} rep {r}: final {:.9}", run.trace.final_energy()));
            rows.push(BakeoffRow {
                optimizer: name.clone(),
                optimizer_index: k,
                repetition: r,
                seed,
                final_energy: run.trace.final_energy(),
                best_energy: run.trace.best_energy,
                total_evals: run.trace.total_evals(),
            });
            traces.push((format!("traces/{k}_{name}_r{r}.csv"), run.trace));
            cx.runs.push(run.metadata);
        }
    }
    let optimizers = b
        .optimizers
        .iter()
        .enumerate()
        .map(|(k, o)| {
            let mine: Vec<&BakeoffRow> = rows.iter().filter(|r| r.optimizer_index == k).collect();
            let e: Vec<f64> = mine.iter().map(|r| r.final_energy).collect();
            let (mean, std) = noisy_vqe::experiment::mean_std(&e);
            OptimizerStats {
                optimizer: o.method.name().into(),
                mean_final_energy: mean,
                std_final_energy: std,
                min_final_energy: e.iter().cloned().fold(f64::INFINITY, f64::min),
                mean_evals: mine.iter().map(|r| r.total_evals as f64).sum::<f64>() / mine.len() as f64,
            }
        })
        .collect();
    cx.out.csv_rows(BAKEOFF_CSV, &rows)?;
    for (path, t) in &traces {
        cx.out.trace(path, t)?;
    }
    cx.out.json(
        SUMMARY_JSON,
        &BakeoffSummary {
            ansatz: kind,
            repetitions: b.repetitions,
            optimizers,
        },
    )
}

fn sweep(cx: &mut Context) -> Result<(), String> {
    let sc = cx.cfg.sweep_config().expect("validated");
    let write_traces = cx.cfg.sweep.as_ref().is_some_and(|s| s.write_traces);
    cx.seeds.insert("seed_base".into(), sc.seed_base);
    cx.log(&format!(
        "sweep {} on {}: {} intensities x {} repetitions, {} workers",
        sc.noise_axis,
        sc.ansatz,
        sc.grid().len(),
        sc.repetitions,
        cx.opts.workers
    ));
    let res: SweepResult = run_noise_sweep_with_workers(&sc, cx.opts.workers).map_err(err)?;
    let trace_dir = write_traces.then(|| cx.cfg.hash()[..16].to_string());
    if let Some(dir) = &trace_dir {
        for row in &res.rows {
            if let Some(t) = &row.trace {
                cx.out.trace(Path::new(dir).join(format!("cell_{}_{}.csv", row.intensity_index, row.repetition)), t)?;
            }
        }
    }
    cx.out.sweep_rows(&res.rows)?;
    let fits = fit_all(&res.curve(), &[FitModel::Linear, FitModel::Erf]);
    for s in &res.stats {
        cx.log(&format!("  {:<8} mean {:.6} std {:.6}", s.intensity, s.mean, s.std));
    }
    cx.out.json(
        SUMMARY_JSON,
        &SweepSummary {
            axis: res.axis,
            ansatz: res.ansatz,
            stats: res.stats,
            fits,
            trace_dir,
        },
    )
}

fn fit(cx: &mut Context) -> Result<(), String> {
    let f = cx.cfg.fit.clone().expect("validated");
    let rows = read_sweep_csv(&f.input)?;
    let points: Vec<(f64, f64, f64)> = intensity_stats(&rows).into_iter().map(|(x, _, m, s)| (x, m, s)).collect();
    let fits = fit_all(&points, &f.models);
    for o in &fits {
        match &o.result {
            Some(r) => println!("{:?}: coefficients {:?} RSS {:.3e} R2 {:.4}", o.model, r.coefficients, r.residual_sum_squares, r.r_squared),
            None => println!("{:?}: {}", o.model, o.error.as_deref().unwrap_or("")),
        }
    }
    cx.out.json(
        SUMMARY_JSON,
        &FitSummary {
            input: f.input,
            points,
            fits,
        },
    )
}

fn splitting(cx: &mut Context) -> Result<(), String> {
    let s = cx.cfg.splitting.clone().expect("validated");
    let rows = read_sweep_csv(&s.input)?;
    let intensity = match s.intensity {
        Some(x) => x,
        None => rows.iter().map(|r| r.intensity).fold(f64::NEG_INFINITY, f64::max),
    };
    let at: Vec<&SweepRow> = rows.iter().filter(|r| (r.intensity - intensity).abs() <= 1e-12 * intensity.abs().max(1.0)).collect();
    if at.is_empty() {
        return Err(format!("{}: no rows at intensity {intensity}", s.input.display()));
    }
    let energies: Vec<f64> = at.iter().map(|r| r.final_energy).collect();
    let params: Vec<Vec<f64>> = at.iter().map(|r| r.final_params.clone()).collect();
    let split = detect_level_splitting(&energies, &params).map_err(err)?;
    println!(
        "intensity {intensity}: {} level(s), centers {:?}, gap {:.6}, period check {}",
        split.levels, split.centers, split.gap, split.param_period_check
    );
    cx.out.json(
        SUMMARY_JSON,
        &SplittingSummary {
            input: s.input,
            intensity,
            samples: energies.len(),
            splitting: split,
        },
    )
}
