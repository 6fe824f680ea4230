//! Integrated squared error of a shrinkage estimate in the frequency domain.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{oracle_weight, ShrinkageProfile};
use crate::distributions::{cf_true, tail_energy, true_block_energies, DistributionSpec};
use crate::error::{Error, Result};
use crate::quad::{legendre_fit, GaussLegendre, LegendrePanel, Neumaier, FIT_ORDER};
use crate::sample::Sample;
use crate::schedule::BlockSchedule;
use crate::spectral::ecf_eval;

/// Everything about the true cf a replication needs: block energies, the
/// tail past the cutoff, and per-block polynomial fits of `conj h`.
#[derive(Debug, Clone)]
pub struct SpectralTruth {
    pub spec: DistributionSpec,
    pub boundaries: Vec<f64>,
    /// `‖θ‖²_k = \int_{B_k} |h|^2`.
    pub true_energies: Vec<f64>,
    /// `\int_{b_{K+1}}^∞ |h|^2`.
    pub tail: f64,
    fits: Vec<Vec<LegendrePanel>>,
}

const FIT_ABS_TOL: f64 = 1e-14;
const FIT_DROP_BELOW: f64 = 1e-16;

impl SpectralTruth {
    pub fn new(spec: &DistributionSpec, schedule: &BlockSchedule) -> Result<Self> {
        spec.validate()?;
        let boundaries = schedule.boundaries[..=schedule.cutoff].to_vec();
        let true_energies = true_block_energies(spec, &boundaries);
        let tail = tail_energy(spec, boundaries[schedule.cutoff]);
        let kinks = spec.cf_kinks();
        let g = |u: f64| cf_true(spec, u).conj();
        let fits = boundaries
            .windows(2)
            .map(|w| legendre_fit(&g, w[0], w[1], &kinks, FIT_ABS_TOL, FIT_DROP_BELOW))
            .collect();
        Ok(SpectralTruth {
            spec: spec.clone(),
            boundaries,
            true_energies,
            tail,
            fits,
        })
    }

    pub fn len(&self) -> usize {
        self.true_energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.true_energies.is_empty()
    }

    /// `Re \int_{B_k} ĥ(u) conj h(u) du = n^{-1} Σ_l Re \int_{B_k} e^{iuX_l} conj h(u) du`
    /// for 0-based block `i`.
    pub fn cross_term(&self, sample: &Sample, i: usize) -> f64 {
        let panels = &self.fits[i];
        if panels.is_empty() {
            return 0.0;
        }
        let mut scratch = [0.0; FIT_ORDER];
        let mut acc = Neumaier::default();
        for &x in sample.values() {
            let mut v = 0.0;
            for p in panels {
                v += p.fourier(x, &mut scratch).re;
            }
            acc.add(v);
        }
        acc.value() / sample.len() as f64
    }

    /// Oracle weights `‖θ‖²_k / (‖θ‖²_k + L_k/n)`.
    pub fn oracle_weights(&self, n: usize) -> Vec<f64> {
        self.boundaries
            .windows(2)
            .zip(&self.true_energies)
            .map(|(w, &t)| oracle_weight(t, w[1] - w[0], n as f64))
            .collect()
    }
}

/// `π^{-1} Σ_k \int_{B_k} |μ_k ĥ - h|^2 + π^{-1} \int_{b_{K+1}}^∞ |h|^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiseReport {
    pub mise: f64,
    /// `π^{-1} \int_{B_k} |μ_k ĥ - h|^2` per block.
    pub per_block: Vec<f64>,
    pub tail_bias: f64,
}

impl MiseReport {
    fn assemble(per_block: Vec<f64>, tail: f64) -> Self {
        let tail_bias = tail / PI;
        let mut acc = Neumaier::default();
        per_block.iter().for_each(|&v| acc.add(v));
        acc.add(tail_bias);
        MiseReport {
            mise: acc.value(),
            per_block,
            tail_bias,
        }
    }
}

/// Frequency-domain ISE from the expansion
/// `\int_B |μĥ - h|^2 = μ^2 ‖y‖^2 - 2μ Re\int_B ĥ conj h + ‖θ‖^2`, using the
/// empirical block energies already computed for the weights.
pub fn plancherel_mise(
    profile: &ShrinkageProfile,
    sample: &Sample,
    truth: &SpectralTruth,
    energies: &[f64],
) -> Result<MiseReport> {
    let k = profile.weights.len();
    if truth.len() != k || energies.len() != k {
        return Err(Error::domain(format!(
            "profile has {k} blocks but truth has {} and energies {}",
            truth.len(),
            energies.len()
        )));
    }
    let per_block = (0..k)
        .map(|i| {
            let mu = profile.weights[i];
            let t = truth.true_energies[i];
            let v = if mu == 0.0 {
                t
            } else {
                mu * mu * energies[i] - 2.0 * mu * truth.cross_term(sample, i) + t
            };
            v / PI
        })
        .collect();
    Ok(MiseReport::assemble(per_block, truth.tail))
}

/// The same quantity by composite Gauss–Legendre over each block, with
/// panels no wider than `2π / range(sample)`.
pub fn plancherel_mise_quad(
    profile: &ShrinkageProfile,
    sample: &Sample,
    spec: &DistributionSpec,
    nodes: usize,
) -> Result<MiseReport> {
    if nodes < 8 {
        return Err(Error::domain(format!("nodes = {nodes} must be at least 8")));
    }
    let rule = GaussLegendre::new(nodes);
    let kinks = spec.cf_kinks();
    let bandwidth = sample.range().max(1.0);
    let per_block = profile
        .boundaries
        .windows(2)
        .zip(&profile.weights)
        .map(|(w, &mu)| {
            let mut edges = vec![w[0]];
            edges.extend(kinks.iter().copied().filter(|&c| c > w[0] && c < w[1]));
            edges.push(w[1]);
            let mut acc = Neumaier::default();
            for e in edges.windows(2) {
                let panels = ((e[1] - e[0]) * bandwidth / (2.0 * PI)).ceil().max(1.0) as usize;
                acc.add(rule.composite(e[0], e[1], panels, |u| {
                    let h = cf_true(spec, u);
                    if mu == 0.0 {
                        h.norm_sqr()
                    } else {
                        (ecf_eval(sample, u) * mu - h).norm_sqr()
                    }
                }));
            }
            acc.value() / PI
        })
        .collect();
    let upper = profile.upper();
    Ok(MiseReport::assemble(per_block, tail_energy(spec, upper)))
}

/// Oracle block risk `n^{-1} L μ [1 - μ L^{-1} ‖θ‖^2]`, `μ = ‖θ‖²/(‖θ‖² + L/n)`.
pub fn oracle_block_risk(true_energy: f64, length: f64, n: f64) -> f64 {
    let mu = oracle_weight(true_energy, length, n);
    length * mu * (1.0 - mu * true_energy / length) / n
}
