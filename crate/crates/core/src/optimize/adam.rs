use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{Objective, OptimizationTrace, Termination, TraceBuilder};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum GradientMode {
    /// `[E(θ + π/2 e_j) − E(θ − π/2 e_j)] / 2`, exact for rotation-generated parameters.
    #[serde(rename = "PARAMETER_SHIFT")]
    ParameterShift,
    #[serde(rename = "CENTRAL_DIFF")]
    CentralDiff { h: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub gradient_mode: GradientMode,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            gradient_mode: GradientMode::ParameterShift,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        let open = |b: f64| b > 0.0 && b < 1.0;
        if !open(self.beta1) || !open(self.beta2) {
            return Err(Error::InvalidConfig("Adam betas must lie in (0, 1)".into()));
        }
        if !(self.alpha > 0.0) || !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig("Adam alpha and epsilon must be positive".into()));
        }
        if let GradientMode::CentralDiff { h } = self.gradient_mode {
            if !(h > 0.0) {
                return Err(Error::InvalidConfig("finite-difference step must be positive".into()));
            }
        }
        Ok(())
    }
}

fn shifted_difference(
    loss: &mut dyn FnMut(&[f64]) -> Result<f64>,
    theta: &[f64],
    shift: f64,
    scale: f64,
) -> Result<Vec<f64>> {
    let mut x = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for j in 0..theta.len() {
        x[j] = theta[j] + shift;
        let up = loss(&x)?;
        x[j] = theta[j] - shift;
        let down = loss(&x)?;
        x[j] = theta[j];
        let g = (up - down) * scale;
        if !g.is_finite() {
            return Err(Error::NonFiniteGradient(j));
        }
        grad.push(g);
    }
    Ok(grad)
}

pub fn parameter_shift_gradient(loss: &mut dyn FnMut(&[f64]) -> Result<f64>, theta: &[f64]) -> Result<Vec<f64>> {
    shifted_difference(loss, theta, FRAC_PI_2, 0.5)
}

pub fn central_difference_gradient(
    loss: &mut dyn FnMut(&[f64]) -> Result<f64>,
    theta: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    shifted_difference(loss, theta, h, 0.5 / h)
}

/// Bias-corrected Adam. Iteration `k` records the loss at `θ_k`, then takes one
/// step; the last record is the final iterate.
pub fn adam_minimize(
    loss: &mut dyn FnMut(&[f64]) -> Result<f64>,
    theta0: &[f64],
    cfg: &AdamConfig,
    max_iterations: usize,
    eval_budget: Option<usize>,
) -> Result<OptimizationTrace> {
    cfg.validate()?;
    let n = theta0.len();
    let mut obj = Objective::new(loss, eval_budget);
    let mut trace = TraceBuilder::new();
    let mut theta = theta0.to_vec();
    let mut m = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut terminated_by = Termination::MaxIter;
    for k in 0..=max_iterations {
        let value = obj.eval(&theta)?;
        trace.record(k, &theta, value, obj.evals());
        if k == max_iterations {
            break;
        }
        if obj.would_exceed(2 * n + 1) {
            terminated_by = Termination::Budget;
            break;
        }
        let mut f = |x: &[f64]| obj.eval(x);
        let grad = match cfg.gradient_mode {
            GradientMode::ParameterShift => parameter_shift_gradient(&mut f, &theta)?,
            GradientMode::CentralDiff { h } => central_difference_gradient(&mut f, &theta, h)?,
        };
        let t = (k + 1) as i32;
        let c1 = 1.0 - cfg.beta1.powi(t);
        let c2 = 1.0 - cfg.beta2.powi(t);
        for j in 0..n {
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * grad[j];
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * grad[j] * grad[j];
            theta[j] -= cfg.alpha * (m[j] / c1) / ((v[j] / c2).sqrt() + cfg.epsilon);
        }
    }
    Ok(trace.finish(theta, terminated_by))
}
