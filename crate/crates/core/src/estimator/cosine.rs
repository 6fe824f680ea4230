//! Blockwise shrinkage in the cosine basis `φ_j(x) = √2 cos(πjx)` on `[0, 1]`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::{ep_weight, stein_weight, EstimatorKind};
use crate::error::{Error, Result};
use crate::quad::Neumaier;
use crate::sample::Sample;
use crate::schedule::BlockSchedule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineEstimate {
    pub kind: EstimatorKind,
    /// `y_j = n^{-1} Σ_l φ_j(X_l)` for `j = 1..=J`.
    pub coefficients: Vec<f64>,
    /// Block of each coefficient as a 0-based `[start, end)` range into
    /// `coefficients`.
    pub blocks: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
}

/// `f̃(x) = 1 + Σ_k μ_k Σ_{j∈B_k} y_j φ_j(x)` with EP or Stein weights
/// computed from `‖y‖²_k = Σ_{j∈B_k} y_j^2`. The schedule must have integer
/// boundaries.
pub fn cosine_estimate(sample: &Sample, schedule: &BlockSchedule, kind: EstimatorKind) -> Result<CosineEstimate> {
    let rule = match kind {
        EstimatorKind::Ep => ep_weight,
        EstimatorKind::Stein => stein_weight,
        EstimatorKind::Oracle => {
            return Err(Error::domain("cosine estimate supports EP and Stein weights only"));
        }
    };
    if let Some(&x) = sample.values().iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::domain(format!("observation {x} outside [0, 1]")));
    }
    let bounds = &schedule.boundaries[..=schedule.cutoff];
    if bounds.iter().any(|b| b.fract() != 0.0) {
        return Err(Error::domain("cosine estimate needs integer block boundaries"));
    }
    let total = bounds[schedule.cutoff] as usize;
    let n = sample.len() as f64;
    let coefficients: Vec<f64> = (1..=total)
        .map(|j| {
            let mut acc = Neumaier::default();
            for &x in sample.values() {
                acc.add(SQRT_2 * (PI * j as f64 * x).cos());
            }
            acc.value() / n
        })
        .collect();
    let blocks: Vec<(usize, usize)> = bounds.windows(2).map(|w| (w[0] as usize, w[1] as usize)).collect();
    let weights = blocks
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let energy: f64 = coefficients[a..b].iter().map(|y| y * y).sum();
            rule(energy, schedule.lengths[i], schedule.thresholds[i], n)
        })
        .collect();
    Ok(CosineEstimate {
        kind,
        coefficients,
        blocks,
        weights,
    })
}

impl CosineEstimate {
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 1.0;
        for (&(a, b), &mu) in self.blocks.iter().zip(&self.weights) {
            if mu == 0.0 {
                continue;
            }
            let mut block = 0.0;
            for j in a..b {
                block += self.coefficients[j] * SQRT_2 * (PI * (j + 1) as f64 * x).cos();
            }
            acc += mu * block;
        }
        acc
    }

    /// `(x, f̃(x))` on `points` equally spaced nodes of `[0, 1]`.
    pub fn grid(&self, points: usize) -> Vec<(f64, f64)> {
        let h = 1.0 / (points.max(2) - 1) as f64;
        (0..points.max(2)).map(|i| (i as f64 * h, self.eval(i as f64 * h))).collect()
    }
}
