//! Sequential coordinate minimization exploiting the sinusoidal dependence of the
//! loss on each rotation angle.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Objective, OptimizationTrace, Termination, TraceBuilder};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ordering {
    #[serde(rename = "ORDERED")]
    Ordered,
    #[serde(rename = "RANDOM_NO_REPLACEMENT")]
    RandomNoReplacement,
}

/// Per-coordinate model of the loss.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NftFit {
    /// `a cos(θ − b) + c` from the cached value and two shifted evaluations.
    #[serde(rename = "SINUSOID")]
    Sinusoid,
    /// Second-order trigonometric interpolation through five equally spaced
    /// points (four fresh evaluations plus the cached value).
    #[serde(rename = "LEAST_SQUARES")]
    LeastSquares,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NftConfig {
    pub reset_interval: usize,
    pub ordering: Ordering,
    /// Caps the run at `sweeps · n_params` iterations when set.
    pub sweeps: Option<usize>,
    pub fit: NftFit,
    /// Stop once a full sweep changes the cached loss by less than this; 0 disables.
    pub convergence_tol: f64,
}

impl Default for NftConfig {
    fn default() -> Self {
        Self {
            reset_interval: 32,
            ordering: Ordering::Ordered,
            sweeps: None,
            fit: NftFit::Sinusoid,
            convergence_tol: 0.0,
        }
    }
}

impl NftConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reset_interval == 0 {
            return Err(Error::InvalidConfig("reset_interval must be at least 1".into()));
        }
        if self.sweeps == Some(0) {
            return Err(Error::InvalidConfig("sweeps must be positive".into()));
        }
        if !(self.convergence_tol >= 0.0) {
            return Err(Error::InvalidConfig("convergence_tol must be non-negative".into()));
        }
        Ok(())
    }
}

/// Step `δ` minimizing `A cos δ + B sin δ + C`, in `(−π/2, 3π/2)`.
fn sinusoid_step(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        if b == 0.0 {
            0.0
        } else {
            -FRAC_PI_2 * b.signum()
        }
    } else {
        (b / a).atan() + if a > 0.0 { PI } else { 0.0 }
    }
}

/// Coefficients `(a0, a1, b1, a2, b2)` interpolating values at `δ_m = 2πm/5`.
fn trig_interpolation(values: &[f64; 5]) -> [f64; 5] {
    let mut c = [0.0; 5];
    c[0] = values.iter().sum::<f64>() / 5.0;
    for h in 1..=2 {
        let (mut ac, mut bs) = (0.0, 0.0);
        for (m, y) in values.iter().enumerate() {
            let x = h as f64 * TAU * m as f64 / 5.0;
            ac += y * x.cos();
            bs += y * x.sin();
        }
        c[2 * h - 1] = 0.4 * ac;
        c[2 * h] = 0.4 * bs;
    }
    c
}

fn trig_eval(c: &[f64; 5], d: f64) -> f64 {
    c[0] + c[1] * d.cos() + c[2] * d.sin() + c[3] * (2.0 * d).cos() + c[4] * (2.0 * d).sin()
}

/// Global minimum of a second-order trigonometric polynomial on `[0, 2π)`.
fn trig_argmin(c: &[f64; 5]) -> (f64, f64) {
    const GRID: usize = 720;
    let step = TAU / GRID as f64;
    let mut best = (0.0, trig_eval(c, 0.0));
    for i in 1..GRID {
        let d = i as f64 * step;
        let v = trig_eval(c, d);
        if v < best.1 {
            best = (d, v);
        }
    }
    // golden-section refinement inside the bracketing cells
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if trig_eval(c, x1) < trig_eval(c, x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let d = 0.5 * (lo + hi);
    let v = trig_eval(c, d);
    if v < best.1 {
        (d, v)
    } else {
        best
    }
}

/// Max deviation of the loss along coordinate `j` from its best single-frequency
/// fit `a + b cos θ + c sin θ`, sampled on a 16-point grid around `theta`.
pub fn sinusoid_residual(
    loss: &mut dyn FnMut(&[f64]) -> Result<f64>,
    theta: &[f64],
    j: usize,
) -> Result<f64> {
    const POINTS: usize = 16;
    let mut x = theta.to_vec();
    let mut ys = [0.0; POINTS];
    for (m, y) in ys.iter_mut().enumerate() {
        x[j] = theta[j] + TAU * m as f64 / POINTS as f64;
        *y = loss(&x)?;
    }
    let a0 = ys.iter().sum::<f64>() / POINTS as f64;
    let (mut a1, mut b1) = (0.0, 0.0);
    for (m, y) in ys.iter().enumerate() {
        let d = TAU * m as f64 / POINTS as f64;
        a1 += y * d.cos();
        b1 += y * d.sin();
    }
    a1 *= 2.0 / POINTS as f64;
    b1 *= 2.0 / POINTS as f64;
    Ok(ys
        .iter()
        .enumerate()
        .map(|(m, y)| {
            let d = TAU * m as f64 / POINTS as f64;
            (y - (a0 + a1 * d.cos() + b1 * d.sin())).abs()
        })
        .fold(0.0, f64::max))
}

struct CoordinateOrder {
    ordering: Ordering,
    n: usize,
    queue: Vec<usize>,
    rng: ChaCha8Rng,
}

impl CoordinateOrder {
    fn next(&mut self) -> usize {
        if self.queue.is_empty() {
            self.queue = (0..self.n).rev().collect();
            if self.ordering == Ordering::RandomNoReplacement {
                self.queue.shuffle(&mut self.rng);
            }
        }
        self.queue.pop().expect("refilled")
    }
}

/// Iteration 0 records the initial evaluation. Iteration `k ≥ 1` updates one
/// coordinate and records the model's predicted minimum, except on every
/// `reset_interval`-th iteration where the loss at the new point is evaluated
/// and recorded instead. Unless the last record already is such a fresh
/// evaluation, a closing record evaluates the final point.
pub fn nft_minimize(
    loss: &mut dyn FnMut(&[f64]) -> Result<f64>,
    theta0: &[f64],
    cfg: &NftConfig,
    max_iterations: usize,
    eval_budget: Option<usize>,
    seed: u64,
) -> Result<OptimizationTrace> {
    cfg.validate()?;
    let n = theta0.len();
    let mut obj = Objective::new(loss, eval_budget);
    let mut trace = TraceBuilder::new();
    let mut theta = theta0.to_vec();
    let mut z0 = obj.eval(&theta)?;
    trace.record(0, &theta, z0, obj.evals());
    if n == 0 {
        return Ok(trace.finish(theta, Termination::Converged));
    }
    let iterations = cfg.sweeps.map_or(max_iterations, |s| max_iterations.min(s * n));
    let mut order = CoordinateOrder {
        ordering: cfg.ordering,
        n,
        queue: Vec::new(),
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    let fresh = match cfg.fit {
        NftFit::Sinusoid => 2,
        NftFit::LeastSquares => 4,
    };
    let mut sweep_start = z0;
    let mut terminated_by = Termination::MaxIter;
    let mut last = (0, true);
    for k in 1..=iterations {
        let refresh = k % cfg.reset_interval == 0;
        if obj.would_exceed(fresh + usize::from(refresh)) {
            terminated_by = Termination::Budget;
            break;
        }
        let j = order.next();
        let origin = theta[j];
        let predicted = match cfg.fit {
            NftFit::Sinusoid => {
                theta[j] = origin + FRAC_PI_2;
                let z1 = obj.eval(&theta)?;
                theta[j] = origin - FRAC_PI_2;
                let z3 = obj.eval(&theta)?;
                let c = 0.5 * (z1 + z3);
                let b = 0.5 * (z1 - z3);
                let a = z0 - c;
                theta[j] = origin + sinusoid_step(a, b);
                c - a.hypot(b)
            }
            NftFit::LeastSquares => {
                let mut ys = [z0; 5];
                for (m, y) in ys.iter_mut().enumerate().skip(1) {
                    theta[j] = origin + TAU * m as f64 / 5.0;
                    *y = obj.eval(&theta)?;
                }
                let (d, v) = trig_argmin(&trig_interpolation(&ys));
                theta[j] = origin + d;
                v
            }
        };
        z0 = if refresh { obj.eval(&theta)? } else { predicted };
        trace.record(k, &theta, z0, obj.evals());
        last = (k, refresh);
        if cfg.convergence_tol > 0.0 && k % n == 0 {
            if (sweep_start - z0).abs() < cfg.convergence_tol {
                terminated_by = Termination::Converged;
                break;
            }
            sweep_start = z0;
        }
    }
    if !last.1 && !obj.would_exceed(1) {
        let value = obj.eval(&theta)?;
        trace.record(last.0 + 1, &theta, value, obj.evals());
    }
    Ok(trace.finish(theta, terminated_by))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: &mut dyn FnMut(&[f64]) -> Result<f64>, theta0: &[f64], cfg: &NftConfig, iters: usize) -> OptimizationTrace {
        nft_minimize(f, theta0, cfg, iters, None, 0).unwrap()
    }

    #[test]
    fn one_step_minimizes_sinusoid() {
        let mut f = |x: &[f64]| Ok(2.0 + (x[0] - 0.3).cos());
        let t = run(&mut f, &[0.0], &NftConfig::default(), 1);
        let theta = t.final_params[0];
        assert!(((theta - 0.3 - PI) / TAU - ((theta - 0.3 - PI) / TAU).round()).abs() < 1e-15);
        assert!((t.final_energy() - 1.0).abs() < 1e-15);
        assert_eq!(t.total_evals(), 4);
        assert_eq!(t.records.len(), 3);
    }

    #[test]
    fn evaluation_count_without_refresh() {
        let mut f = |x: &[f64]| Ok(x[0].sin() + 0.5 * (x[1] + 1.0).cos() - x[2].cos());
        let cfg = NftConfig {
            reset_interval: 1000,
            ..NftConfig::default()
        };
        let t = run(&mut f, &[0.1, 0.2, 0.3], &cfg, 7);
        let (closing, body) = t.records.split_last().unwrap();
        for r in body {
            assert_eq!(r.cumulative_evals, 1 + 2 * r.iteration);
        }
        assert_eq!((closing.iteration, closing.cumulative_evals), (8, 16));
        assert_eq!(closing.params, t.final_params);
        let cfg = NftConfig {
            reset_interval: 3,
            ..NftConfig::default()
        };
        let t = run(&mut f, &[0.1, 0.2, 0.3], &cfg, 7);
        assert_eq!(t.total_evals(), 1 + 2 * 7 + 2 + 1);
        let t = run(&mut f, &[0.1, 0.2, 0.3], &cfg, 6);
        assert_eq!(t.total_evals(), 1 + 2 * 6 + 2);
    }

    #[test]
    fn separable_sinusoids_solved_in_one_sweep() {
        let mut f = |x: &[f64]| Ok(x[0].sin() + 0.5 * (x[1] + 1.0).cos() - x[2].cos());
        let t = run(&mut f, &[0.1, 0.2, 0.3], &NftConfig::default(), 3);
        assert!((t.final_energy() - -2.5).abs() < 1e-14);
        assert!((t.best_energy - -2.5).abs() < 1e-14);
    }

    #[test]
    fn least_squares_fallback_handles_second_harmonic() {
        let mut f = |x: &[f64]| Ok(x[0].cos() + 0.4 * (2.0 * x[0] + 0.2).sin());
        let cfg = NftConfig {
            fit: NftFit::LeastSquares,
            reset_interval: 1,
            ..NftConfig::default()
        };
        let t = run(&mut f, &[0.0], &cfg, 1);
        let dense = (0..100_000)
            .map(|i| {
                let x = TAU * i as f64 / 100_000.0;
                x.cos() + 0.4 * (2.0 * x + 0.2).sin()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((t.final_energy() - dense).abs() < 1e-8);
        assert_eq!(t.total_evals(), 1 + 4 + 1);
    }

    #[test]
    fn random_ordering_visits_each_coordinate_per_sweep() {
        let mut visited = Vec::new();
        let mut order = CoordinateOrder {
            ordering: Ordering::RandomNoReplacement,
            n: 5,
            queue: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(9),
        };
        for _ in 0..2 {
            let mut sweep: Vec<usize> = (0..5).map(|_| order.next()).collect();
            visited.push(sweep.clone());
            sweep.sort_unstable();
            assert_eq!(sweep, vec![0, 1, 2, 3, 4]);
        }
        assert_ne!(visited[0], visited[1]);
    }

    #[test]
    fn step_rule_cases() {
        // A > 0: minimum opposite the current point
        assert!((sinusoid_step(1.0, 0.0) - PI).abs() < 1e-15);
        assert_eq!(sinusoid_step(-1.0, 0.0), 0.0);
        assert!((sinusoid_step(0.0, 1.0) + FRAC_PI_2).abs() < 1e-15);
        assert_eq!(sinusoid_step(0.0, 0.0), 0.0);
    }

    #[test]
    fn residual_zero_for_pure_sinusoid() {
        let mut f = |x: &[f64]| Ok(0.3 * (x[1] - 0.7).cos() + 1.0);
        assert!(sinusoid_residual(&mut f, &[0.0, 0.4], 1).unwrap() < 1e-14);
        let mut g = |x: &[f64]| Ok((2.0 * x[0]).cos());
        assert!(sinusoid_residual(&mut g, &[0.0], 0).unwrap() > 0.5);
    }

    #[test]
    fn budget_stops_early() {
        let mut f = |x: &[f64]| Ok(x[0].cos());
        let t = nft_minimize(&mut f, &[0.5], &NftConfig::default(), 100, Some(6), 0).unwrap();
        assert_eq!(t.terminated_by, Termination::Budget);
        assert!(t.total_evals() <= 6);
    }
}
