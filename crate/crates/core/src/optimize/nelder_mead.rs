//! Downhill simplex with an optional single restart.

use serde::{Deserialize, Serialize};

use super::{Objective, OptimizationTrace, Termination, TraceBuilder};
use crate::error::{Error, Result};

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NelderMeadConfig {
    pub initial_simplex_size: f64,
    pub restart: bool,
    pub restart_scale: f64,
    /// Restart fires if the converged value exceeds this.
    pub restart_threshold: f64,
    pub ftol: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            initial_simplex_size: 0.5,
            restart: true,
            restart_scale: 2.0,
            restart_threshold: -1.0,
            ftol: 1e-8,
        }
    }
}

impl NelderMeadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_simplex_size > 0.0) {
            return Err(Error::InvalidConfig("initial_simplex_size must be positive".into()));
        }
        if !(self.restart_scale > 0.0) || !(self.ftol >= 0.0) {
            return Err(Error::InvalidConfig(
                "restart_scale must be positive and ftol non-negative".into(),
            ));
        }
        Ok(())
    }
}

struct Simplex {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl Simplex {
    fn build(obj: &mut Objective<'_>, center: &[f64], size: f64) -> Result<Self> {
        let mut points = vec![center.to_vec()];
        for i in 0..center.len() {
            let mut p = center.to_vec();
            p[i] += size;
            points.push(p);
        }
        let values = points.iter().map(|p| obj.eval(p)).collect::<Result<_>>()?;
        let mut s = Self { points, values };
        s.sort();
        Ok(s)
    }

    fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]));
        self.points = idx.iter().map(|&i| self.points[i].clone()).collect();
        self.values = idx.iter().map(|&i| self.values[i]).collect();
    }

    fn spread(&self) -> f64 {
        self.values[self.values.len() - 1] - self.values[0]
    }

    /// `centroid + t·(centroid − worst)`.
    fn along(&self, centroid: &[f64], t: f64) -> Vec<f64> {
        let worst = self.points.last().expect("non-empty");
        centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect()
    }
}

/// Standard reflection/expansion/contraction/shrink with coefficients
/// (1, 2, 0.5, 0.5). Each iteration records the best vertex.
pub fn nelder_mead_minimize(
    loss: &mut dyn FnMut(&[f64]) -> Result<f64>,
    theta0: &[f64],
    cfg: &NelderMeadConfig,
    max_iterations: usize,
    eval_budget: Option<usize>,
) -> Result<OptimizationTrace> {
    cfg.validate()?;
    let n = theta0.len();
    let mut obj = Objective::new(loss, eval_budget);
    let mut trace = TraceBuilder::new();
    if obj.would_exceed(n + 1) {
        let v = obj.eval(theta0)?;
        trace.record(0, theta0, v, obj.evals());
        return Ok(trace.finish(theta0.to_vec(), Termination::Budget));
    }
    let mut s = Simplex::build(&mut obj, theta0, cfg.initial_simplex_size)?;
    trace.record(0, &s.points[0], s.values[0], obj.evals());
    let mut restarted = false;
    let mut terminated_by = Termination::MaxIter;
    let mut k = 0;
    while k < max_iterations {
        if s.spread() < cfg.ftol {
            if cfg.restart && !restarted && s.values[0] > cfg.restart_threshold {
                if obj.would_exceed(n + 1) {
                    terminated_by = Termination::Budget;
                    break;
                }
                restarted = true;
                let center = s.points[0].clone();
                s = Simplex::build(&mut obj, &center, cfg.initial_simplex_size * cfg.restart_scale)?;
                k += 1;
                trace.record(k, &s.points[0], s.values[0], obj.evals());
                continue;
            }
            terminated_by = Termination::Converged;
            break;
        }
        // worst case: reflection, contraction and a full shrink
        if obj.would_exceed(2 + n) {
            terminated_by = Termination::Budget;
            break;
        }
        k += 1;
        let mut centroid = vec![0.0; n];
        for p in &s.points[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let reflected = s.along(&centroid, REFLECT);
        let fr = obj.eval(&reflected)?;
        if fr < s.values[0] {
            let expanded = s.along(&centroid, REFLECT * EXPAND);
            let fe = obj.eval(&expanded)?;
            if fe < fr {
                s.points[n] = expanded;
                s.values[n] = fe;
            } else {
                s.points[n] = reflected;
                s.values[n] = fr;
            }
        } else if fr < s.values[n - 1] {
            s.points[n] = reflected;
            s.values[n] = fr;
        } else {
            let outside = fr < s.values[n];
            let contracted = if outside {
                s.along(&centroid, REFLECT * CONTRACT)
            } else {
                s.along(&centroid, -CONTRACT)
            };
            let fc = obj.eval(&contracted)?;
            if fc < if outside { fr } else { s.values[n] } {
                s.points[n] = contracted;
                s.values[n] = fc;
            } else {
                let best = s.points[0].clone();
                for i in 1..=n {
                    let p: Vec<f64> = best
                        .iter()
                        .zip(&s.points[i])
                        .map(|(b, x)| b + SHRINK * (x - b))
                        .collect();
                    s.values[i] = obj.eval(&p)?;
                    s.points[i] = p;
                }
            }
        }
        s.sort();
        trace.record(k, &s.points[0], s.values[0], obj.evals());
    }
    Ok(trace.finish(s.points[0].clone(), terminated_by))
}
