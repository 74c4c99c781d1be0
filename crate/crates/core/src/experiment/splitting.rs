use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::mean_std;
use crate::error::{Error, Result};

const MIN_SAMPLES: usize = 10;
const LLOYD_ITERATIONS: usize = 100;
const SEPARATION: f64 = 3.0;
const PERIOD_TOL: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSplitting {
    pub levels: usize,
    /// One center per level, ascending.
    pub centers: Vec<f64>,
    /// Distance between the two 2-means centers, reported even when `levels == 1`.
    pub gap: f64,
    /// Cluster (0 = lower) of each sample under the 2-means split.
    pub assignment: Vec<usize>,
    pub param_period_check: bool,
}

fn two_means(values: &[f64]) -> ([f64; 2], Vec<usize>) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut centers = [lo, hi];
    let mut assignment = vec![0; values.len()];
    for _ in 0..LLOYD_ITERATIONS {
        for (a, &v) in assignment.iter_mut().zip(values) {
            *a = usize::from((v - centers[1]).abs() < (v - centers[0]).abs());
        }
        let mut next = centers;
        for (k, c) in next.iter_mut().enumerate() {
            let members: Vec<f64> = values.iter().zip(&assignment).filter(|(_, &a)| a == k).map(|(v, _)| *v).collect();
            if !members.is_empty() {
                *c = members.iter().sum::<f64>() / members.len() as f64;
            }
        }
        if next == centers {
            break;
        }
        centers = next;
    }
    (centers, assignment)
}

fn near_multiple_of_tau(d: f64) -> bool {
    (d - (d / TAU).round() * TAU).abs() <= PERIOD_TOL
}

/// 1-D 2-means on the energies. Two levels are reported when the center gap
/// exceeds three times the larger within-cluster standard deviation. The
/// parameter check compares, per cluster, the sample whose energy is closest
/// to the cluster center.
pub fn detect_level_splitting(energies: &[f64], params: &[Vec<f64>]) -> Result<LevelSplitting> {
    if energies.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: energies.len(),
        });
    }
    if params.len() != energies.len() {
        return Err(Error::DimensionMismatch {
            expected: energies.len(),
            got: params.len(),
        });
    }
    let (centers, assignment) = two_means(energies);
    let gap = centers[1] - centers[0];
    let members = |k: usize| -> Vec<usize> { (0..energies.len()).filter(|&i| assignment[i] == k).collect() };
    let spread = |k: usize| mean_std(&members(k).iter().map(|&i| energies[i]).collect::<Vec<_>>()).1;
    let split = !members(0).is_empty() && !members(1).is_empty() && gap > SEPARATION * spread(0).max(spread(1));
    if !split {
        let (mean, _) = mean_std(energies);
        return Ok(LevelSplitting {
            levels: 1,
            centers: vec![mean],
            gap,
            assignment,
            param_period_check: false,
        });
    }
    let representative = |k: usize| -> usize {
        *members(k)
            .iter()
            .min_by(|&&a, &&b| (energies[a] - centers[k]).abs().total_cmp(&(energies[b] - centers[k]).abs()))
            .expect("non-empty cluster")
    };
    let (a, b) = (&params[representative(0)], &params[representative(1)]);
    let param_period_check = a.len() == b.len() && a.iter().zip(b).all(|(x, y)| near_multiple_of_tau(x - y));
    Ok(LevelSplitting {
        levels: 2,
        centers: centers.to_vec(),
        gap,
        assignment,
        param_period_check,
    })
}
