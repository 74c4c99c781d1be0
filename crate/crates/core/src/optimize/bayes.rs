//! Gaussian-process Bayesian optimization with expected improvement.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::{Objective, OptimizationTrace, Termination, TraceBuilder};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BayesConfig {
    pub n_initial: usize,
    pub n_iterations: usize,
    pub kernel_lengthscale: f64,
    pub noise_variance: f64,
    pub acq_candidates: usize,
    /// Per-coordinate `[lo, hi]`; a single pair applies to every coordinate.
    /// Defaults to `[−2π, 2π]`.
    pub bounds: Vec<(f64, f64)>,
}

impl Default for BayesConfig {
    fn default() -> Self {
        Self {
            n_initial: 10,
            n_iterations: 50,
            kernel_lengthscale: 1.0,
            noise_variance: 1e-4,
            acq_candidates: 2000,
            bounds: Vec::new(),
        }
    }
}

impl BayesConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_initial < 2 {
            return Err(Error::InvalidConfig("n_initial must be at least 2".into()));
        }
        if !(self.kernel_lengthscale > 0.0) || !(self.noise_variance >= 0.0) || self.acq_candidates == 0 {
            return Err(Error::InvalidConfig(
                "lengthscale and candidate count must be positive, noise variance non-negative".into(),
            ));
        }
        if self.bounds.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
            return Err(Error::InvalidConfig("bounds must be finite with lo < hi".into()));
        }
        Ok(())
    }

    pub fn bounds_for(&self, n: usize) -> Vec<(f64, f64)> {
        match self.bounds.len() {
            0 => vec![(-TAU, TAU); n],
            1 => vec![self.bounds[0]; n],
            _ => self.bounds.clone(),
        }
    }
}

/// Zero-mean GP with a squared-exponential kernel on standardized targets.
#[derive(Clone, Debug)]
pub struct GaussianProcess {
    x: Vec<Vec<f64>>,
    lengthscale: f64,
    y_mean: f64,
    y_scale: f64,
    /// Lower Cholesky factor of `K + σ²I`.
    chol: Vec<Vec<f64>>,
    alpha: Vec<f64>,
}

fn kernel(a: &[f64], b: &[f64], lengthscale: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-0.5 * d2 / (lengthscale * lengthscale)).exp()
}

fn cholesky(mut a: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= a[j][k] * a[j][k];
        }
        if !(d > 0.0) {
            return Err(Error::SingularKernel);
        }
        let d = d.sqrt();
        a[j][j] = d;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= a[i][k] * a[j][k];
            }
            a[i][j] = s / d;
        }
        for k in j + 1..n {
            a[j][k] = 0.0;
        }
    }
    Ok(a)
}

fn forward(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; b.len()];
    for i in 0..b.len() {
        let s: f64 = (0..i).map(|k| l[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / l[i][i];
    }
    x
}

fn backward(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k][i] * x[k]).sum();
        x[i] = (b[i] - s) / l[i][i];
    }
    x
}

impl GaussianProcess {
    pub fn fit(x: &[Vec<f64>], y: &[f64], lengthscale: f64, noise_variance: f64) -> Result<Self> {
        let n = x.len();
        if n == 0 || y.len() != n {
            return Err(Error::InsufficientPoints { needed: 1, got: n });
        }
        let y_mean = y.iter().sum::<f64>() / n as f64;
        let var = y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n as f64;
        let y_scale = if var > 0.0 { var.sqrt() } else { 1.0 };
        let z: Vec<f64> = y.iter().map(|v| (v - y_mean) / y_scale).collect();
        let k: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| kernel(&x[i], &x[j], lengthscale) + if i == j { noise_variance } else { 0.0 })
                    .collect()
            })
            .collect();
        let chol = cholesky(k)?;
        let alpha = backward(&chol, &forward(&chol, &z));
        Ok(Self {
            x: x.to_vec(),
            lengthscale,
            y_mean,
            y_scale,
            chol,
            alpha,
        })
    }

    /// Posterior mean and standard deviation in standardized units.
    fn predict_standardized(&self, p: &[f64]) -> (f64, f64) {
        let ks: Vec<f64> = self.x.iter().map(|xi| kernel(xi, p, self.lengthscale)).collect();
        let mu = ks.iter().zip(&self.alpha).map(|(a, b)| a * b).sum();
        let v = forward(&self.chol, &ks);
        let var = (1.0 - v.iter().map(|a| a * a).sum::<f64>()).max(0.0);
        (mu, var.sqrt())
    }

    /// Posterior mean and standard deviation in the units of the training targets.
    pub fn predict(&self, p: &[f64]) -> (f64, f64) {
        let (mu, sd) = self.predict_standardized(p);
        (self.y_mean + self.y_scale * mu, self.y_scale * sd)
    }

    fn standardize(&self, y: f64) -> f64 {
        (y - self.y_mean) / self.y_scale
    }
}

/// Expected improvement below `best` for a Gaussian prediction, never negative.
pub fn expected_improvement(mean: f64, sd: f64, best: f64) -> f64 {
    let gain = best - mean;
    if sd <= 0.0 {
        return gain.max(0.0);
    }
    let z = gain / sd;
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    (gain * n.cdf(z) + sd * n.pdf(z)).max(0.0)
}

fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = 2u64;
    while out.len() < count {
        if out.iter().all(|p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Halton points in the unit cube with a random (Cranley-Patterson) shift.
fn shifted_halton(count: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let bases = primes(dim);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    (1..=count as u64)
        .map(|i| {
            bases
                .iter()
                .zip(&shift)
                .map(|(&b, s)| (radical_inverse(i, b) + s).fract())
                .collect()
        })
        .collect()
}

/// Evaluates `n_initial` quasi-random points, then `n_iterations` expected
/// improvement maximizers over uniform random candidates. Every evaluation is
/// recorded as one iteration.
pub fn bayesian_minimize(
    loss: &mut dyn FnMut(&[f64]) -> Result<f64>,
    bounds: &[(f64, f64)],
    cfg: &BayesConfig,
    max_iterations: usize,
    eval_budget: Option<usize>,
    seed: u64,
) -> Result<OptimizationTrace> {
    cfg.validate()?;
    if bounds.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
        return Err(Error::InvalidConfig("bounds must be finite with lo < hi".into()));
    }
    let dim = bounds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut obj = Objective::new(loss, eval_budget);
    let mut trace = TraceBuilder::new();
    let scale = |u: &[f64]| -> Vec<f64> {
        u.iter()
            .zip(bounds)
            .map(|(v, (lo, hi))| lo + v * (hi - lo))
            .collect()
    };
    let mut xs: Vec<Vec<f64>> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut terminated_by = Termination::MaxIter;
    for u in shifted_halton(cfg.n_initial, dim, &mut rng) {
        if obj.would_exceed(1) {
            terminated_by = Termination::Budget;
            break;
        }
        let p = scale(&u);
        let v = obj.eval(&p)?;
        trace.record(xs.len(), &p, v, obj.evals());
        xs.push(p);
        ys.push(v);
    }
    let iterations = cfg.n_iterations.min(max_iterations);
    if terminated_by == Termination::MaxIter {
        for _ in 0..iterations {
            if obj.would_exceed(1) {
                terminated_by = Termination::Budget;
                break;
            }
            let gp = GaussianProcess::fit(&xs, &ys, cfg.kernel_lengthscale, cfg.noise_variance)?;
            let best = gp.standardize(ys.iter().cloned().fold(f64::INFINITY, f64::min));
            let mut winner = None;
            let mut best_ei = f64::NEG_INFINITY;
            for _ in 0..cfg.acq_candidates {
                let u: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
                let p = scale(&u);
                let (mu, sd) = gp.predict_standardized(&p);
                let ei = expected_improvement(mu, sd, best);
                if ei > best_ei {
                    best_ei = ei;
                    winner = Some(p);
                }
            }
            let p = winner.expect("at least one candidate");
            let v = obj.eval(&p)?;
            trace.record(xs.len(), &p, v, obj.evals());
            xs.push(p);
            ys.push(v);
        }
    }
    let final_params = trace.best_params().map(<[f64]>::to_vec).unwrap_or_default();
    Ok(trace.finish(final_params, terminated_by))
}
