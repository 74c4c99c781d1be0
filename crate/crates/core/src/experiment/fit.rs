use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};

pub const LM_MAX_STEPS: usize = 500;
const C2_GRID: [f64; 7] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitModel {
    #[serde(rename = "LINEAR")]
    Linear,
    /// `c0 + c1·erf(c2·p)` with `c1, c2 ≥ 0`.
    #[serde(rename = "ERF")]
    Erf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    /// `[slope, intercept]` or `[c0, c1, c2]`.
    pub coefficients: Vec<f64>,
    pub residual_sum_squares: f64,
    pub r_squared: f64,
}

impl FitResult {
    pub fn eval(&self, p: f64) -> f64 {
        let c = &self.coefficients;
        match self.model {
            FitModel::Linear => c[0] * p + c[1],
            FitModel::Erf => erf_model(c, p),
        }
    }
}

fn erf_model(c: &[f64], p: f64) -> f64 {
    c[0] + c[1] * erf(c[2] * p)
}

fn rss(c: &[f64], xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter().zip(ys).map(|(&x, &y)| (y - erf_model(c, x)).powi(2)).sum()
}

fn r_squared(rss: f64, ys: &[f64]) -> f64 {
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let tss: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    if tss > 0.0 {
        1.0 - rss / tss
    } else if rss == 0.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    }
}

/// Solves the 3×3 system `a x = b` by Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn fit_linear(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

fn fit_erf(xs: &[f64], ys: &[f64]) -> Result<[f64; 3]> {
    let c0 = ys[0];
    let c1 = (ys[ys.len() - 1] - ys[0]).max(0.0);
    let mut c = C2_GRID
        .iter()
        .map(|&c2| [c0, c1, c2])
        .min_by(|a, b| rss(a, xs, ys).total_cmp(&rss(b, xs, ys)))
        .expect("non-empty grid");
    let mut current = rss(&c, xs, ys);
    let floor = 1e-30 * ys.iter().map(|y| y * y).sum::<f64>().max(1e-300);
    let mut lambda = 1e-3;
    for _ in 0..LM_MAX_STEPS {
        if current <= floor {
            return Ok(c);
        }
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for (&x, &y) in xs.iter().zip(ys) {
            let g = [1.0, erf(c[2] * x), c[1] * 2.0 / PI.sqrt() * x * (-(c[2] * x).powi(2)).exp()];
            let r = y - erf_model(&c, x);
            for i in 0..3 {
                jtr[i] += g[i] * r;
                for k in 0..3 {
                    jtj[i][k] += g[i] * g[k];
                }
            }
        }
        // a step can be rejected many times before λ saturates
        loop {
            let mut a = jtj;
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-12);
            }
            let step = solve3(a, jtr);
            let trial = step.map(|d| [c[0] + d[0], (c[1] + d[1]).max(0.0), (c[2] + d[2]).max(0.0)]);
            if let Some(t) = trial {
                let r = rss(&t, xs, ys);
                if r.is_finite() && r < current {
                    let moved: f64 = (0..3).map(|i| (t[i] - c[i]).powi(2)).sum::<f64>().sqrt();
                    let scale: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let gain = current - r;
                    c = t;
                    current = r;
                    lambda = (lambda / 10.0).max(1e-15);
                    if moved <= 1e-13 * (scale + 1e-13) || gain <= 1e-15 * current {
                        return Ok(c);
                    }
                    break;
                }
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                // no downhill direction left at machine precision
                return Ok(c);
            }
        }
    }
    Err(Error::FitNotConverged(LM_MAX_STEPS))
}

/// Least-squares fit of `(intensity, mean, std)` points; the std column is not
/// used as a weight.
pub fn fit_noise_curve(points: &[(f64, f64, f64)], model: FitModel) -> Result<FitResult> {
    let needed = match model {
        FitModel::Linear => 3,
        FitModel::Erf => 4,
    };
    if points.len() < needed {
        return Err(Error::InsufficientPoints {
            needed,
            got: points.len(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (coefficients, rss_value) = match model {
        FitModel::Linear => {
            let (slope, intercept) = fit_linear(&xs, &ys);
            let r = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
            (vec![slope, intercept], r)
        }
        FitModel::Erf => {
            let c = fit_erf(&xs, &ys)?;
            (c.to_vec(), rss(&c, &xs, &ys))
        }
    };
    Ok(FitResult {
        model,
        coefficients,
        residual_sum_squares: rss_value,
        r_squared: r_squared(rss_value, &ys),
    })
}
