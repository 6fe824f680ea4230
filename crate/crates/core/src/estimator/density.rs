//! Density reconstruction by closed-form Fourier inversion of a
//! shrinkage cf estimate.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CfEstimate;
use crate::error::{Error, Result};
use crate::quad::Neumaier;
use crate::sample::Sample;
use crate::spectral::sinc_term;

/// `m` equally spaced points on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        if points < 2 || !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::domain(format!(
                "grid needs x_min < x_max and at least 2 points, got [{x_min}, {x_max}] with {points}"
            )));
        }
        Ok(Grid { x_min, x_max, points })
    }

    /// `[q_{0.001} - 5 IQR, q_{0.999} + 5 IQR]` with 2048 points.
    pub fn covering(sample: &Sample) -> Self {
        let iqr = sample.quantile(0.75) - sample.quantile(0.25);
        let pad = 5.0 * if iqr > 0.0 { iqr } else { 1.0 };
        Grid {
            x_min: sample.quantile(0.001) - pad,
            x_max: sample.quantile(0.999) + pad,
            points: 2048,
        }
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points).map(|i| self.x_min + h * i as f64).collect()
    }
}

/// `f̃(x) = π^{-1} Σ_k μ_k n^{-1} Σ_l [sin(b_{k+1}Δ_l) - sin(b_k Δ_l)]/Δ_l`,
/// `Δ_l = X_l - x`, evaluated with the block differences telescoped.
pub fn density_point(est: &CfEstimate<'_>, x: f64) -> f64 {
    let coeffs = est.profile.boundary_coefficients();
    density_with(&coeffs, est.sample, x)
}

fn density_with(coeffs: &[(f64, f64)], sample: &Sample, x: f64) -> f64 {
    if coeffs.is_empty() {
        return 0.0;
    }
    let mut acc = Neumaier::default();
    for &xl in sample.values() {
        let d = xl - x;
        let mut row = 0.0;
        for &(b, c) in coeffs {
            row += c * sinc_term(b, d);
        }
        acc.add(row);
    }
    acc.value() / (PI * sample.len() as f64)
}

/// `(x, f̃(x))` on every grid node.
pub fn density_grid(est: &CfEstimate<'_>, grid: &Grid) -> Vec<(f64, f64)> {
    let coeffs = est.profile.boundary_coefficients();
    grid.nodes()
        .into_par_iter()
        .map(|x| (x, density_with(&coeffs, est.sample, x)))
        .collect()
}

fn trapezoid(values: &[(f64, f64)]) -> f64 {
    let mut acc = Neumaier::default();
    for w in values.windows(2) {
        acc.add(0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1));
    }
    acc.value()
}

/// Clips negative values and rescales so the trapezoid integral is 1.
pub fn nonneg_project(values: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if let (Some(first), Some(last)) = (values.first(), values.last()) {
        if first.1.abs() >= 1e-6 || last.1.abs() >= 1e-6 {
            log::warn!("density grid does not cover the mass: edge values {} and {}", first.1, last.1);
        }
    }
    let clipped: Vec<(f64, f64)> = values.iter().map(|&(x, v)| (x, v.max(0.0))).collect();
    let mass = trapezoid(&clipped);
    if !(mass > 0.0) {
        return Err(Error::Degenerate("density estimate has no positive mass".into()));
    }
    Ok(clipped.into_iter().map(|(x, v)| (x, v / mass)).collect())
}

/// CSV with columns `x, f_hat`.
pub fn write_density_csv<W: Write>(values: &[(f64, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "f_hat"])?;
    for (x, v) in values {
        w.write_record([x.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
