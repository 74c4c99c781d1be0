//! Simultaneous perturbation stochastic approximation and its two-stage variant.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Objective, OptimizationTrace, Termination, TraceBuilder};
use crate::error::{Error, Result};

/// Gain schedule `a_k = a/(A+k+1)^α`, `c_k = c/(k+1)^γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpsaConfig {
    pub a: f64,
    pub c: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self::fine()
    }
}

impl SpsaConfig {
    /// Guideline gains.
    pub fn fine() -> Self {
        Self {
            a: 0.15,
            c: 0.1,
            big_a: 0.0,
            alpha: 0.602,
            gamma: 0.101,
        }
    }

    /// Large gains for the first SPSAreopt stage.
    pub fn coarse() -> Self {
        Self {
            a: 2.0,
            c: 0.6,
            ..Self::fine()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.c > 0.0) {
            return Err(Error::InvalidConfig("SPSA gains a and c must be positive".into()));
        }
        if !(self.big_a >= 0.0 && self.alpha > 0.0 && self.gamma > 0.0) {
            return Err(Error::InvalidConfig("SPSA A must be non-negative and exponents positive".into()));
        }
        Ok(())
    }

    fn gains(&self, k: usize) -> (f64, f64) {
        let k = k as f64;
        (
            self.a / (self.big_a + k + 1.0).powf(self.alpha),
            self.c / (k + 1.0).powf(self.gamma),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpsaReoptConfig {
    pub coarse: SpsaConfig,
    pub fine: SpsaConfig,
    pub convergence_window: usize,
    pub convergence_tol: f64,
    /// Iterations of the fine stage; defaults to `max_iterations`.
    pub fine_iterations: Option<usize>,
}

impl Default for SpsaReoptConfig {
    fn default() -> Self {
        Self {
            coarse: SpsaConfig::coarse(),
            fine: SpsaConfig::fine(),
            convergence_window: 10,
            convergence_tol: 1e-2,
            fine_iterations: None,
        }
    }
}

impl SpsaReoptConfig {
    pub fn validate(&self) -> Result<()> {
        self.coarse.validate()?;
        self.fine.validate()?;
        if self.convergence_window == 0 || !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "convergence_window and convergence_tol must be positive".into(),
            ));
        }
        if self.fine_iterations == Some(0) {
            return Err(Error::InvalidConfig("fine_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// One SPSA step: returns the gradient estimate and the better perturbed point.
fn spsa_step(
    obj: &mut Objective<'_>,
    theta: &[f64],
    ck: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let delta: Vec<f64> = (0..theta.len())
        .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + ck * d).collect();
    let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - ck * d).collect();
    let fp = obj.eval(&plus)?;
    let fm = obj.eval(&minus)?;
    let scale = (fp - fm) / (2.0 * ck);
    let grad = delta.iter().map(|d| scale / d).collect();
    Ok(if fp <= fm { (grad, plus, fp) } else { (grad, minus, fm) })
}

struct Stage {
    theta: Vec<f64>,
    stopped_by_budget: bool,
}

/// Runs up to `iterations` SPSA updates, recording the better perturbed point of
/// each. `stop` sees the energies recorded so far in this stage.
#[allow(clippy::too_many_arguments)]
fn run_stage(
    obj: &mut Objective<'_>,
    trace: &mut TraceBuilder,
    gains: &SpsaConfig,
    theta0: Vec<f64>,
    iterations: usize,
    first_iteration: usize,
    rng: &mut ChaCha8Rng,
    mut stop: impl FnMut(&[f64]) -> bool,
) -> Result<Stage> {
    let mut theta = theta0;
    let mut energies = Vec::new();
    for k in 0..iterations {
        if obj.would_exceed(2) {
            return Ok(Stage {
                theta,
                stopped_by_budget: true,
            });
        }
        let (ak, ck) = gains.gains(k);
        let (grad, point, value) = spsa_step(obj, &theta, ck, rng)?;
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= ak * g;
        }
        trace.record(first_iteration + k, &point, value, obj.evals());
        energies.push(value);
        if stop(&energies) {
            break;
        }
    }
    Ok(Stage {
        theta,
        stopped_by_budget: false,
    })
}

fn close(
    mut obj: Objective<'_>,
    mut trace: TraceBuilder,
    theta: Vec<f64>,
    by_budget: bool,
) -> Result<OptimizationTrace> {
    let last = trace_last_iteration(&trace);
    if by_budget || obj.would_exceed(1) {
        return Ok(trace.finish(theta, Termination::Budget));
    }
    let value = obj.eval(&theta)?;
    trace.record(last + 1, &theta, value, obj.evals());
    Ok(trace.finish(theta, Termination::MaxIter))
}

fn trace_last_iteration(trace: &TraceBuilder) -> usize {
    trace.records.last().map_or(0, |r| r.iteration)
}

/// Record 0 is the initial point; records `1..=K` hold the better of the two
/// perturbed evaluations of each iteration; a closing record evaluates the final
/// iterate.
pub fn spsa_minimize(
    loss: &mut dyn FnMut(&[f64]) -> Result<f64>,
    theta0: &[f64],
    cfg: &SpsaConfig,
    max_iterations: usize,
    eval_budget: Option<usize>,
    seed: u64,
) -> Result<OptimizationTrace> {
    cfg.validate()?;
    let mut obj = Objective::new(loss, eval_budget);
    let mut trace = TraceBuilder::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f0 = obj.eval(theta0)?;
    trace.record(0, theta0, f0, obj.evals());
    let stage = run_stage(&mut obj, &mut trace, cfg, theta0.to_vec(), max_iterations, 1, &mut rng, |_| false)?;
    close(obj, trace, stage.theta, stage.stopped_by_budget)
}

/// Coarse SPSA until the moving average of the last `convergence_window` energies
/// moves by less than `convergence_tol` between consecutive windows, then fine
/// SPSA from the best point seen so far.
pub fn spsa_reopt_minimize(
    loss: &mut dyn FnMut(&[f64]) -> Result<f64>,
    theta0: &[f64],
    cfg: &SpsaReoptConfig,
    max_iterations: usize,
    eval_budget: Option<usize>,
    seed: u64,
) -> Result<OptimizationTrace> {
    cfg.validate()?;
    let mut obj = Objective::new(loss, eval_budget);
    let mut trace = TraceBuilder::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f0 = obj.eval(theta0)?;
    trace.record(0, theta0, f0, obj.evals());
    let w = cfg.convergence_window;
    let settled = |e: &[f64]| {
        let n = e.len();
        if n < 2 * w {
            return false;
        }
        let recent = e[n - w..].iter().sum::<f64>() / w as f64;
        let previous = e[n - 2 * w..n - w].iter().sum::<f64>() / w as f64;
        (recent - previous).abs() < cfg.convergence_tol
    };
    let stage1 = run_stage(&mut obj, &mut trace, &cfg.coarse, theta0.to_vec(), max_iterations, 1, &mut rng, settled)?;
    if stage1.stopped_by_budget {
        return close(obj, trace, stage1.theta, true);
    }
    let start = trace.best_params().expect("initial point recorded").to_vec();
    trace.mark_stage();
    let first = trace_last_iteration(&trace) + 1;
    let fine_iterations = cfg.fine_iterations.unwrap_or(max_iterations);
    let stage2 = run_stage(&mut obj, &mut trace, &cfg.fine, start, fine_iterations, first, &mut rng, |_| false)?;
    close(obj, trace, stage2.theta, stage2.stopped_by_budget)
}
