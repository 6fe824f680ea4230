//! Blockwise shrinkage weights and the characteristic-function and density
//! estimates built from them.

mod cosine;
mod density;
mod mise;

pub use cosine::{cosine_estimate, CosineEstimate};
pub use density::{density_grid, density_point, nonneg_project, write_density_csv, Grid};
pub use mise::{oracle_block_risk, plancherel_mise, plancherel_mise_quad, MiseReport, SpectralTruth};

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distributions::{true_block_energies, DistributionSpec};
use crate::error::Result;
use crate::sample::Sample;
use crate::schedule::BlockSchedule;
use crate::spectral::{ecf_eval, BlockStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    #[serde(alias = "EP")]
    Ep,
    #[serde(alias = "Stein")]
    Stein,
    #[serde(alias = "Oracle")]
    Oracle,
}

impl EstimatorKind {
    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::Ep => "ep",
            EstimatorKind::Stein => "stein",
            EstimatorKind::Oracle => "oracle",
        }
    }
}

/// Hard-threshold weight `(E - L/n)/E · I(E >= (1+t)L/n)`.
pub fn ep_weight(energy: f64, length: f64, t: f64, n: f64) -> f64 {
    let noise = length / n;
    if energy > 0.0 && energy >= (1.0 + t) * noise {
        (energy - noise) / energy
    } else {
        0.0
    }
}

/// Soft-threshold weight `(E - (1+t)L/n)/E · I(E >= (1+t)L/n)`.
pub fn stein_weight(energy: f64, length: f64, t: f64, n: f64) -> f64 {
    let cut = (1.0 + t) * length / n;
    if energy > 0.0 && energy >= cut {
        (energy - cut) / energy
    } else {
        0.0
    }
}

/// Risk-minimising weight `T/(T + L/n)` for true block energy `T`.
pub fn oracle_weight(true_energy: f64, length: f64, n: f64) -> f64 {
    if true_energy <= 0.0 {
        0.0
    } else {
        true_energy / (true_energy + length / n)
    }
}

/// Per-block weights `μ_1..μ_K` together with the blocks they act on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkageProfile {
    pub kind: EstimatorKind,
    pub n: usize,
    /// `b_1 < ... < b_{K+1}`.
    pub boundaries: Vec<f64>,
    pub weights: Vec<f64>,
}

fn energy_weights(
    stats: &BlockStats,
    schedule: &BlockSchedule,
    kind: EstimatorKind,
    rule: fn(f64, f64, f64, f64) -> f64,
) -> ShrinkageProfile {
    let n = stats.n as f64;
    let weights = stats
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| rule(b.energy, schedule.lengths[i], schedule.thresholds[i], n))
        .collect();
    ShrinkageProfile {
        kind,
        n: stats.n,
        boundaries: schedule.boundaries[..=stats.blocks.len()].to_vec(),
        weights,
    }
}

pub fn ep_weights(stats: &BlockStats, schedule: &BlockSchedule) -> ShrinkageProfile {
    energy_weights(stats, schedule, EstimatorKind::Ep, ep_weight)
}

pub fn stein_weights(stats: &BlockStats, schedule: &BlockSchedule) -> ShrinkageProfile {
    energy_weights(stats, schedule, EstimatorKind::Stein, stein_weight)
}

/// Oracle weights from the true block energies of `spec`.
pub fn oracle_weights(spec: &DistributionSpec, schedule: &BlockSchedule) -> ShrinkageProfile {
    let bounds = &schedule.boundaries[..=schedule.cutoff];
    oracle_weights_from(&true_block_energies(spec, bounds), schedule)
}

/// Oracle weights from precomputed true block energies.
pub fn oracle_weights_from(true_energies: &[f64], schedule: &BlockSchedule) -> ShrinkageProfile {
    let n = schedule.n as f64;
    let weights = true_energies
        .iter()
        .take(schedule.cutoff)
        .enumerate()
        .map(|(i, &t)| oracle_weight(t, schedule.lengths[i], n))
        .collect();
    ShrinkageProfile {
        kind: EstimatorKind::Oracle,
        n: schedule.n,
        boundaries: schedule.boundaries[..=schedule.cutoff].to_vec(),
        weights,
    }
}

/// Weights for each `kind` from one set of block statistics.
pub fn profile_for(
    kind: EstimatorKind,
    stats: &BlockStats,
    schedule: &BlockSchedule,
    true_energies: &[f64],
) -> ShrinkageProfile {
    match kind {
        EstimatorKind::Ep => ep_weights(stats, schedule),
        EstimatorKind::Stein => stein_weights(stats, schedule),
        EstimatorKind::Oracle => oracle_weights_from(true_energies, schedule),
    }
}

impl ShrinkageProfile {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `b_{K+1}`; the estimate vanishes from here on.
    pub fn upper(&self) -> f64 {
        self.boundaries[self.weights.len()]
    }

    /// Weight in force at frequency `|u|`, zero past the last block.
    pub fn weight_at(&self, u: f64) -> f64 {
        let u = u.abs();
        if u >= self.upper() {
            return 0.0;
        }
        let i = self.boundaries.partition_point(|&b| b <= u) - 1;
        self.weights[i]
    }

    /// Coefficient of `sin(b_j Δ)/Δ` at each boundary once the block
    /// differences are telescoped: `μ_j - μ_{j+1}` with `μ_0 = μ_{K+1} = 0`.
    pub(crate) fn boundary_coefficients(&self) -> Vec<(f64, f64)> {
        let k = self.weights.len();
        (0..=k)
            .map(|j| {
                let below = if j >= 1 { self.weights[j - 1] } else { 0.0 };
                let above = if j < k { self.weights[j] } else { 0.0 };
                (self.boundaries[j], below - above)
            })
            .filter(|&(b, c)| c != 0.0 && b != 0.0)
            .collect()
    }

    /// CSV with columns `k, weight, kind`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "weight", "kind"])?;
        for (i, mu) in self.weights.iter().enumerate() {
            w.write_record([(i + 1).to_string(), mu.to_string(), self.kind.label().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `u ↦ Σ_k μ_k ĥ(u) I(|u| ∈ B_k)`.
#[derive(Debug, Clone, Copy)]
pub struct CfEstimate<'a> {
    pub profile: &'a ShrinkageProfile,
    pub sample: &'a Sample,
}

pub fn assemble_cf<'a>(profile: &'a ShrinkageProfile, sample: &'a Sample) -> CfEstimate<'a> {
    CfEstimate { profile, sample }
}

impl CfEstimate<'_> {
    pub fn eval(&self, u: f64) -> Complex64 {
        let mu = self.profile.weight_at(u);
        if mu == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        ecf_eval(self.sample, u) * mu
    }

    pub fn density(&self, x: f64) -> f64 {
        density_point(self, x)
    }

    /// CSV with columns `u, re, im, weight`.
    pub fn write_csv<W: Write>(&self, us: &[f64], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "re", "im", "weight"])?;
        for &u in us {
            let h = self.eval(u);
            w.write_record([
                u.to_string(),
                h.re.to_string(),
                h.im.to_string(),
                self.profile.weight_at(u).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
