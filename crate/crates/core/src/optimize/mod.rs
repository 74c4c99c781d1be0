//! Classical optimizers driving the variational loop.
//!
//! Every optimizer works on a fallible loss `FnMut(&[f64]) -> Result<f64>` and
//! returns an [`OptimizationTrace`] holding one record per iteration.

mod adam;
mod bayes;
mod nelder_mead;
mod nft;
mod spsa;

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use adam::{adam_minimize, central_difference_gradient, parameter_shift_gradient, AdamConfig, GradientMode};
pub use bayes::{bayesian_minimize, expected_improvement, BayesConfig, GaussianProcess};
pub use nelder_mead::{nelder_mead_minimize, NelderMeadConfig};
pub use nft::{nft_minimize, sinusoid_residual, NftConfig, NftFit, Ordering};
pub use spsa::{spsa_minimize, spsa_reopt_minimize, SpsaConfig, SpsaReoptConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    #[serde(rename = "MAX_ITER")]
    MaxIter,
    #[serde(rename = "CONVERGED")]
    Converged,
    #[serde(rename = "BUDGET")]
    Budget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub params: Vec<f64>,
    pub energy: f64,
    pub cumulative_evals: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub records: Vec<TraceRecord>,
    pub best_params: Vec<f64>,
    pub best_energy: f64,
    /// The optimizer's final accepted point.
    pub final_params: Vec<f64>,
    pub terminated_by: Termination,
    /// Index into `records` of the first record of the second SPSAreopt stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage_boundary: Option<usize>,
}

impl OptimizationTrace {
    /// Energy of the last record.
    pub fn final_energy(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.energy)
    }

    pub fn total_evals(&self) -> usize {
        self.records.last().map_or(0, |r| r.cumulative_evals)
    }

    /// Writes `iteration,cumulative_evals,energy,params_0..` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.records.first().map_or(0, |r| r.params.len());
        write!(w, "iteration,cumulative_evals,energy")?;
        for j in 0..n {
            write!(w, ",params_{j}")?;
        }
        writeln!(w)?;
        for r in &self.records {
            write!(w, "{},{},{:?}", r.iteration, r.cumulative_evals, r.energy)?;
            for p in &r.params {
                write!(w, ",{p:?}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Parses records written by [`write_csv`](Self::write_csv).
    pub fn read_csv_records<R: BufRead>(r: R) -> std::result::Result<Vec<TraceRecord>, String> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or("empty trace file")?
            .map_err(|e| e.to_string())?;
        if !header.starts_with("iteration,cumulative_evals,energy") {
            return Err(format!("unexpected trace header {header:?}"));
        }
        let mut records = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| e.to_string())?;
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| format!("line {}: bad {what}", i + 2);
            let mut fields = line.split(',');
            let iteration = fields.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("iteration"))?;
            let cumulative_evals = fields.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("cumulative_evals"))?;
            let energy = fields.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("energy"))?;
            let params = fields
                .map(|s| s.parse::<f64>().map_err(|_| bad("parameter")))
                .collect::<std::result::Result<_, _>>()?;
            records.push(TraceRecord {
                iteration,
                params,
                energy,
                cumulative_evals,
            });
        }
        Ok(records)
    }
}

/// Loss wrapper counting evaluations and rejecting non-finite values.
pub(crate) struct Objective<'a> {
    loss: &'a mut dyn FnMut(&[f64]) -> Result<f64>,
    evals: usize,
    budget: Option<usize>,
}

impl<'a> Objective<'a> {
    pub(crate) fn new(loss: &'a mut dyn FnMut(&[f64]) -> Result<f64>, budget: Option<usize>) -> Self {
        Self {
            loss,
            evals: 0,
            budget,
        }
    }

    pub(crate) fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let v = (self.loss)(x)?;
        self.evals += 1;
        if !v.is_finite() {
            return Err(Error::NonFiniteLoss(self.evals));
        }
        Ok(v)
    }

    pub(crate) fn evals(&self) -> usize {
        self.evals
    }

    /// True if `needed` more evaluations would exceed the budget.
    pub(crate) fn would_exceed(&self, needed: usize) -> bool {
        self.budget.is_some_and(|b| self.evals + needed > b)
    }
}

/// Accumulates records and tracks the best one.
pub(crate) struct TraceBuilder {
    records: Vec<TraceRecord>,
    best: Option<(f64, Vec<f64>)>,
    stage_boundary: Option<usize>,
}

impl TraceBuilder {
    pub(crate) fn new() -> Self {
        Self {
            records: Vec::new(),
            best: None,
            stage_boundary: None,
        }
    }

    pub(crate) fn record(&mut self, iteration: usize, params: &[f64], energy: f64, cumulative_evals: usize) {
        if self.best.as_ref().map_or(true, |(b, _)| energy < *b) {
            self.best = Some((energy, params.to_vec()));
        }
        self.records.push(TraceRecord {
            iteration,
            params: params.to_vec(),
            energy,
            cumulative_evals,
        });
    }

    pub(crate) fn mark_stage(&mut self) {
        if self.stage_boundary.is_none() {
            self.stage_boundary = Some(self.records.len());
        }
    }

    pub(crate) fn best_params(&self) -> Option<&[f64]> {
        self.best.as_ref().map(|(_, p)| p.as_slice())
    }


    pub(crate) fn finish(self, final_params: Vec<f64>, terminated_by: Termination) -> OptimizationTrace {
        let (best_energy, best_params) = self.best.unwrap_or((f64::NAN, final_params.clone()));
        OptimizationTrace {
            records: self.records,
            best_params,
            best_energy,
            final_params,
            terminated_by,
            stage_boundary: self.stage_boundary,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Method {
    #[serde(rename = "NFT")]
    Nft(NftConfig),
    #[serde(rename = "SPSA")]
    Spsa(SpsaConfig),
    #[serde(rename = "SPSA_REOPT")]
    SpsaReopt(SpsaReoptConfig),
    #[serde(rename = "NELDER_MEAD")]
    NelderMead(NelderMeadConfig),
    #[serde(rename = "ADAM")]
    Adam(AdamConfig),
    #[serde(rename = "BAYESIAN")]
    Bayesian(BayesConfig),
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Nft(_) => "NFT",
            Method::Spsa(_) => "SPSA",
            Method::SpsaReopt(_) => "SPSA_REOPT",
            Method::NelderMead(_) => "NELDER_MEAD",
            Method::Adam(_) => "ADAM",
            Method::Bayesian(_) => "BAYESIAN",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub method: Method,
    pub max_iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_budget: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl OptimizerConfig {
    pub fn new(method: Method, max_iterations: usize) -> Self {
        Self {
            method,
            max_iterations,
            eval_budget: None,
            seed: 0,
        }
    }

    pub fn nft(max_iterations: usize) -> Self {
        Self::new(Method::Nft(NftConfig::default()), max_iterations)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if self.eval_budget == Some(0) {
            return Err(Error::InvalidConfig("eval_budget must be positive".into()));
        }
        match &self.method {
            Method::Nft(c) => c.validate(),
            Method::Spsa(c) => c.validate(),
            Method::SpsaReopt(c) => c.validate(),
            Method::NelderMead(c) => c.validate(),
            Method::Adam(c) => c.validate(),
            Method::Bayesian(c) => c.validate(),
        }
    }
}

/// Runs the configured optimizer from `theta0`.
pub fn minimize(
    loss: &mut dyn FnMut(&[f64]) -> Result<f64>,
    theta0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<OptimizationTrace> {
    cfg.validate()?;
    let (max, budget, seed) = (cfg.max_iterations, cfg.eval_budget, cfg.seed);
    match &cfg.method {
        Method::Nft(c) => nft_minimize(loss, theta0, c, max, budget, seed),
        Method::Spsa(c) => spsa_minimize(loss, theta0, c, max, budget, seed),
        Method::SpsaReopt(c) => spsa_reopt_minimize(loss, theta0, c, max, budget, seed),
        Method::NelderMead(c) => nelder_mead_minimize(loss, theta0, c, max, budget),
        Method::Adam(c) => adam_minimize(loss, theta0, c, max, budget),
        Method::Bayesian(c) => {
            let bounds = c.bounds_for(theta0.len());
            bayesian_minimize(loss, &bounds, c, max, budget, seed)
        }
    }
}
