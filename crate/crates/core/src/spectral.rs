//! Empirical characteristic function and block energies `\int_B |ĥ|^2`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distributions::{true_block_energy, DistributionSpec};
use crate::error::{Error, Result};
use crate::quad::{GaussLegendre, Neumaier};
use crate::sample::Sample;
use crate::schedule::BlockSchedule;

/// `ĥ(u) = n^{-1} Σ exp(i u X_l)`, summed in index order with compensation.
pub fn ecf_eval(sample: &Sample, u: f64) -> Complex64 {
    let mut re = Neumaier::default();
    let mut im = Neumaier::default();
    for &x in sample.values() {
        let (s, c) = (u * x).sin_cos();
        re.add(c);
        im.add(s);
    }
    let n = sample.len() as f64;
    Complex64::new(re.value() / n, im.value() / n)
}

/// How block energies are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum EnergyMethod {
    /// Pick the cheaper of the two paths from a cost model.
    #[default]
    Auto,
    /// Closed-form pairwise sums, `O(n^2)` per boundary set.
    Exact,
    /// Composite Gauss–Legendre over `|ĥ|^2` with `nodes` points per panel.
    Quadrature { nodes: usize },
}

/// Per-panel order used by the quadrature path under [`EnergyMethod::Auto`].
pub const DEFAULT_QUAD_NODES: usize = 24;

/// Below `|Δ| b < DIRECT_CUTOFF` a pair is evaluated as `sin(bΔ)/Δ` directly
/// instead of through the product expansion.
const DIRECT_CUTOFF: f64 = 1e-3;
const ROW_TILE: usize = 16;
const BOUNDARY_CHUNK: usize = 64;

/// `E(b) = \int_0^b |ĥ(u)|^2 du` for every `b` in `bounds` (each `>= 0`).
///
/// `E(b) = n^{-2} [n b + 2 Σ_{l<m} sin(b Δ_lm) / Δ_lm]`, with
/// `sin(bX_l - bX_m)` expanded so that sines and cosines are computed once per
/// (observation, boundary) and the pair loop is a multiply-add.
pub fn cumulative_energies_exact(sample: &Sample, bounds: &[f64]) -> Vec<f64> {
    let x = sample.values();
    let n = x.len();
    let mut out = vec![0.0; bounds.len()];
    for (chunk_idx, chunk) in bounds.chunks(BOUNDARY_CHUNK).enumerate() {
        let jc = chunk.len();
        let mut s = vec![0.0; n * jc];
        let mut c = vec![0.0; n * jc];
        for (m, &xm) in x.iter().enumerate() {
            for (j, &b) in chunk.iter().enumerate() {
                let (sv, cv) = (b * xm).sin_cos();
                s[m * jc + j] = sv;
                c[m * jc + j] = cv;
            }
        }
        let bmax = chunk.iter().copied().fold(0.0f64, f64::max);
        let threshold = if bmax > 0.0 { DIRECT_CUTOFF / bmax } else { f64::INFINITY };
        let mut totals = vec![Neumaier::default(); jc];
        let mut direct: Vec<(usize, usize)> = Vec::new();
        let mut acc_a = vec![0.0; ROW_TILE * jc];
        let mut acc_b = vec![0.0; ROW_TILE * jc];
        for l0 in (0..n).step_by(ROW_TILE) {
            let l1 = (l0 + ROW_TILE).min(n);
            acc_a.iter_mut().for_each(|v| *v = 0.0);
            acc_b.iter_mut().for_each(|v| *v = 0.0);
            for m in (l0 + 1)..n {
                let xm = x[m];
                let cm = &c[m * jc..(m + 1) * jc];
                let sm = &s[m * jc..(m + 1) * jc];
                for l in l0..l1.min(m) {
                    let d = x[l] - xm;
                    if d.abs() < threshold {
                        direct.push((l, m));
                        continue;
                    }
                    let inv = 1.0 / d;
                    let row = (l - l0) * jc;
                    let a = &mut acc_a[row..row + jc];
                    let b = &mut acc_b[row..row + jc];
                    for ((aj, bj), (cj, sj)) in a.iter_mut().zip(b.iter_mut()).zip(cm.iter().zip(sm)) {
                        *aj += cj * inv;
                        *bj += sj * inv;
                    }
                }
            }
            for l in l0..l1 {
                let row = (l - l0) * jc;
                for j in 0..jc {
                    let v = s[l * jc + j] * acc_a[row + j] - c[l * jc + j] * acc_b[row + j];
                    totals[j].add(v);
                }
            }
        }
        for &(l, m) in &direct {
            let d = x[l] - x[m];
            for (j, &b) in chunk.iter().enumerate() {
                totals[j].add(sinc_term(b, d));
            }
        }
        let nf = n as f64;
        for (j, &b) in chunk.iter().enumerate() {
            out[chunk_idx * BOUNDARY_CHUNK + j] = (nf * b + 2.0 * totals[j].value()) / (nf * nf);
        }
    }
    out
}

/// `sin(bΔ)/Δ` with its series limit for tiny `Δ`.
#[inline]
pub(crate) fn sinc_term(b: f64, d: f64) -> f64 {
    if d.abs() < 1e-12 * b.abs().max(1.0) {
        b - b * b * b * d * d / 6.0
    } else {
        (b * d).sin() / d
    }
}

/// `\int_a^b |ĥ(u)|^2 du` from the pairwise closed form.
pub fn block_energy_exact(sample: &Sample, a: f64, b: f64) -> Result<f64> {
    check_block(a, b)?;
    let x = sample.values();
    let n = x.len();
    let mut total = Neumaier::default();
    for l in 0..n {
        for m in (l + 1)..n {
            let d = x[l] - x[m];
            let v = if d.abs() < 1e-12 * a.abs().max(b.abs()).max(1.0) {
                (b - a) - (b * b * b - a * a * a) * d * d / 6.0
            } else {
                ((b * d).sin() - (a * d).sin()) / d
            };
            total.add(v);
        }
    }
    let nf = n as f64;
    Ok((nf * (b - a) + 2.0 * total.value()) / (nf * nf))
}

fn check_block(a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0 && b > a && b.is_finite()) {
        return Err(Error::domain(format!("block [{a}, {b}] must satisfy 0 <= a < b")));
    }
    Ok(())
}

/// `\int_a^b |ĥ(u)|^2 du` by composite Gauss–Legendre; panels are at most
/// `2π / range(sample)` wide so that every oscillation is resolved.
pub fn block_energy_quad(sample: &Sample, a: f64, b: f64, quad_nodes: usize) -> Result<f64> {
    check_block(a, b)?;
    if quad_nodes < 8 {
        return Err(Error::domain(format!("quad_nodes = {quad_nodes} must be at least 8")));
    }
    let rule = GaussLegendre::new(quad_nodes);
    let panels = quad_panels(sample, a, b);
    Ok(rule.composite(a, b, panels, |u| ecf_eval(sample, u).norm_sqr()))
}

fn quad_panels(sample: &Sample, a: f64, b: f64) -> usize {
    let range = sample.range();
    if range == 0.0 {
        1
    } else {
        ((b - a) * range / (2.0 * PI)).ceil().max(1.0) as usize
    }
}

/// Energies of the consecutive blocks `[bounds[k], bounds[k+1])`.
pub fn block_energies(sample: &Sample, bounds: &[f64], method: EnergyMethod) -> Result<Vec<f64>> {
    if bounds.len() < 2 {
        return Ok(Vec::new());
    }
    for w in bounds.windows(2) {
        check_block(w[0], w[1])?;
    }
    let method = match method {
        EnergyMethod::Auto => choose_method(sample, bounds),
        m => m,
    };
    match method {
        EnergyMethod::Quadrature { nodes } => bounds
            .windows(2)
            .map(|w| block_energy_quad(sample, w[0], w[1], nodes))
            .collect(),
        _ => {
            let cumulative = cumulative_energies_exact(sample, bounds);
            Ok(cumulative.windows(2).map(|w| w[1] - w[0]).collect())
        }
    }
}

/// Cost model: the exact path is about `n^2/2` multiply-adds per boundary,
/// the quadrature path one `sin_cos` per (observation, node).
fn choose_method(sample: &Sample, bounds: &[f64]) -> EnergyMethod {
    let n = sample.len() as f64;
    let j = bounds.len() as f64;
    let exact = 0.5 * n * n * (2.0 * j + 10.0);
    let total = bounds[bounds.len() - 1] - bounds[0];
    let panels = (total * sample.range() / (2.0 * PI)).ceil() + j;
    let quad = n * panels * DEFAULT_QUAD_NODES as f64 * 30.0;
    if quad < exact {
        EnergyMethod::Quadrature {
            nodes: DEFAULT_QUAD_NODES,
        }
    } else {
        EnergyMethod::Exact
    }
}

/// `Θ̂ = L^{-1} ‖y‖^2 - n^{-1}`.
pub fn theta_hat(energy: f64, length: f64, n: usize) -> f64 {
    energy / length - 1.0 / n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockStat {
    /// 1-based block index.
    pub k: usize,
    pub lo: f64,
    pub hi: f64,
    pub length: f64,
    /// `‖y‖^2_k = \int_{B_k} |ĥ|^2`.
    pub energy: f64,
    pub theta_hat: f64,
    /// `‖θ‖^2_k = \int_{B_k} |h|^2` when the distribution is known.
    pub true_energy: Option<f64>,
    pub theta_true: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockStats {
    pub n: usize,
    pub blocks: Vec<BlockStat>,
}

impl BlockStats {
    /// Statistics for blocks `1..=K` of `schedule`.
    pub fn compute(sample: &Sample, schedule: &BlockSchedule, method: EnergyMethod) -> Result<Self> {
        let n = sample.len();
        let bounds = &schedule.boundaries[..=schedule.cutoff];
        let energies = block_energies(sample, bounds, method)?;
        let blocks = energies
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let (lo, hi) = schedule.block(i);
                let length = hi - lo;
                // |ĥ| <= 1 bounds the energy by the block length; clip rounding.
                let energy = e.clamp(0.0, length);
                BlockStat {
                    k: i + 1,
                    lo,
                    hi,
                    length,
                    energy,
                    theta_hat: theta_hat(energy, length, n),
                    true_energy: None,
                    theta_true: None,
                }
            })
            .collect();
        Ok(BlockStats { n, blocks })
    }

    /// Attaches the true block energies of `spec`.
    pub fn with_truth(mut self, spec: &DistributionSpec) -> Self {
        for b in &mut self.blocks {
            let t = true_block_energy(spec, b.lo, b.hi);
            b.true_energy = Some(t);
            b.theta_true = Some(t / b.length);
        }
        self
    }

    pub fn energies(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.energy).collect()
    }

    /// CSV with columns `k, energy, theta_hat, true_energy, theta_true`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "energy", "theta_hat", "true_energy", "theta_true"])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for b in &self.blocks {
            w.write_record([
                b.k.to_string(),
                b.energy.to_string(),
                b.theta_hat.to_string(),
                opt(b.true_energy),
                opt(b.theta_true),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
