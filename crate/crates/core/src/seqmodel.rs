//! Gaussian-shift sequence model `y_j = θ_j + n^{-1/2} ξ_j` with the same
//! blockwise estimators, for checks where the risk lemma applies exactly.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{seq_bound_report, FreeParameters, UniversalConstants};
use crate::error::{Error, Result};
use crate::estimator::{ep_weight, oracle_weight, stein_weight};
use crate::sample::replication_rng;
use crate::schedule::{build_schedule_with, BlockSchedule, Lengths, Portfolio};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeqExperiment {
    /// True coefficients `θ_1, θ_2, ...`; anything past the list is zero.
    pub theta: Vec<f64>,
    pub n: usize,
    pub schedule: BlockSchedule,
    pub seed: u64,
}

impl SeqExperiment {
    /// Builds the integer-length schedule for `portfolio` at `n`.
    pub fn new(theta: Vec<f64>, n: usize, portfolio: &Portfolio, seed: u64) -> Result<Self> {
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("theta must be finite"));
        }
        let schedule = build_schedule_with(portfolio, n, Lengths::Integer)?;
        Ok(SeqExperiment { theta, n, schedule, seed })
    }

    /// Number of coefficients observed: the list, extended to cover block `K`.
    pub fn dimension(&self) -> usize {
        self.theta.len().max(self.schedule.upper() as usize)
    }

    fn theta_at(&self, j: usize) -> f64 {
        self.theta.get(j).copied().unwrap_or(0.0)
    }

    /// `‖θ‖²_k` for blocks `1..=K`.
    pub fn block_energies(&self) -> Vec<f64> {
        self.schedule
            .index_ranges()
            .into_iter()
            .take(self.schedule.cutoff)
            .map(|r| r.map(|j| self.theta_at(j).powi(2)).sum())
            .collect()
    }

    /// `Σ_{j > b_{K+1}} θ_j^2` (up to the end of the list).
    pub fn tail_energy(&self) -> f64 {
        let upper = self.schedule.upper() as usize;
        self.theta.iter().skip(upper).map(|v| v * v).sum()
    }

    /// `n^{-1} Σ_{k<=K} L_k μ_k + Σ_{k>K} ‖θ‖²_k`.
    pub fn oracle_risk(&self) -> f64 {
        let n = self.n as f64;
        let blocks: f64 = self
            .block_energies()
            .iter()
            .zip(&self.schedule.lengths)
            .map(|(&t, &l)| l * oracle_weight(t, l, n) / n)
            .sum();
        blocks + self.tail_energy()
    }
}

/// `y_j = θ_j + σ ξ_j` for `j < dimension`.
pub fn simulate_with_scale<R: Rng + ?Sized>(theta: &[f64], dimension: usize, sigma: f64, rng: &mut R) -> Vec<f64> {
    (0..dimension)
        .map(|j| {
            let xi: f64 = rng.sample(StandardNormal);
            theta.get(j).copied().unwrap_or(0.0) + sigma * xi
        })
        .collect()
}

/// Observations for replication `rep`, drawn from the `(seed, rep)` stream.
pub fn simulate_seq(exp: &SeqExperiment, rep: u64) -> Vec<f64> {
    let mut rng = replication_rng(exp.seed, rep);
    simulate_with_scale(&exp.theta, exp.dimension(), (exp.n as f64).powf(-0.5), &mut rng)
}

fn block_energy(y: &[f64], r: &std::ops::Range<usize>) -> f64 {
    r.clone().map(|j| y.get(j).copied().unwrap_or(0.0).powi(2)).sum()
}

fn shrink_by(y: &[f64], schedule: &BlockSchedule, weight: impl Fn(usize, f64) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; y.len()];
    for (i, r) in schedule.index_ranges().into_iter().take(schedule.cutoff).enumerate() {
        let mu = weight(i, block_energy(y, &r));
        for j in r {
            if j < y.len() {
                out[j] = mu * y[j];
            }
        }
    }
    out
}

/// `θ̃_j = μ̃_k y_j` on blocks `k <= K`, zero beyond.
pub fn ep_seq_estimate(y: &[f64], schedule: &BlockSchedule) -> Vec<f64> {
    let n = schedule.n as f64;
    shrink_by(y, schedule, |i, e| ep_weight(e, schedule.lengths[i], schedule.thresholds[i], n))
}

pub fn stein_seq_estimate(y: &[f64], schedule: &BlockSchedule) -> Vec<f64> {
    let n = schedule.n as f64;
    shrink_by(y, schedule, |i, e| stein_weight(e, schedule.lengths[i], schedule.thresholds[i], n))
}

/// `μ_k y_j` with the oracle weights of the true block energies.
pub fn oracle_seq_estimate(y: &[f64], true_energies: &[f64], schedule: &BlockSchedule) -> Vec<f64> {
    let n = schedule.n as f64;
    shrink_by(y, schedule, |i, _| oracle_weight(true_energies[i], schedule.lengths[i], n))
}

/// `θ̌_j = y_j` on the 1-based blocks in `upsilon`, `θ_j` elsewhere.
pub fn modified_estimate(y: &[f64], theta: &[f64], schedule: &BlockSchedule, upsilon: &[usize]) -> Vec<f64> {
    let mut out: Vec<f64> = (0..y.len()).map(|j| theta.get(j).copied().unwrap_or(0.0)).collect();
    let ranges = schedule.index_ranges();
    for &k in upsilon {
        for j in ranges[k - 1].clone() {
            if j < y.len() {
                out[j] = y[j];
            }
        }
    }
    out
}

/// Blocks where the barred remainder terms reach 1.
pub fn upsilon0_bar(exp: &SeqExperiment, params: &FreeParameters, consts: &UniversalConstants) -> Result<Vec<usize>> {
    let report = seq_bound_report(&exp.block_energies(), exp.tail_energy(), &exp.schedule, params, consts)?;
    Ok(report.aggregate.upsilon0_bar)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqEstimator {
    Ep,
    Stein,
    Oracle,
    /// Observations on the given 1-based blocks, truth elsewhere.
    Modified(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeqRisk {
    /// Monte Carlo mean of `‖θ̂ - θ‖^2`.
    pub mc_risk: f64,
    pub std_error: f64,
    pub oracle_risk: f64,
    /// Monte Carlo mean of `‖θ̂ - θ‖²_k` for blocks `1..=K`.
    pub block_risk: Vec<f64>,
    pub block_std_error: Vec<f64>,
    /// `‖θ̂ - θ‖^2` per replication.
    pub replications: Vec<f64>,
}

/// Pairwise sum with a fixed split, independent of thread count.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        len if len <= 8 => v.iter().sum(),
        len => {
            let (a, b) = v.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Mean and standard error (`sd / √R`) with pairwise sums.
pub fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let r = v.len() as f64;
    let mean = pairwise_sum(v) / r;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = v.iter().map(|x| (x - mean).powi(2)).collect();
    (mean, (pairwise_sum(&dev) / (r - 1.0) / r).sqrt())
}

/// Monte Carlo risk of `estimator` over replications `0..replications`.
pub fn seq_risks(exp: &SeqExperiment, estimator: &SeqEstimator, replications: usize) -> Result<SeqRisk> {
    if replications < 2 {
        return Err(Error::domain("at least two replications are needed for a standard error"));
    }
    let energies = exp.block_energies();
    let ranges: Vec<_> = exp.schedule.index_ranges().into_iter().take(exp.schedule.cutoff).collect();
    let per_rep: Vec<(f64, Vec<f64>)> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let y = simulate_seq(exp, rep);
            let est = match estimator {
                SeqEstimator::Ep => ep_seq_estimate(&y, &exp.schedule),
                SeqEstimator::Stein => stein_seq_estimate(&y, &exp.schedule),
                SeqEstimator::Oracle => oracle_seq_estimate(&y, &energies, &exp.schedule),
                SeqEstimator::Modified(set) => modified_estimate(&y, &exp.theta, &exp.schedule, set),
            };
            let err: Vec<f64> = (0..est.len()).map(|j| (est[j] - exp.theta_at(j)).powi(2)).collect();
            let blocks = ranges.iter().map(|r| pairwise_sum(&err[r.clone()])).collect();
            // Coefficients past the observed dimension contribute θ_j^2.
            let beyond: f64 = exp.theta.iter().skip(est.len()).map(|v| v * v).sum();
            (pairwise_sum(&err) + beyond, blocks)
        })
        .collect();
    let totals: Vec<f64> = per_rep.iter().map(|p| p.0).collect();
    let (mc_risk, std_error) = mean_and_se(&totals);
    let (block_risk, block_std_error) = (0..ranges.len())
        .map(|k| mean_and_se(&per_rep.iter().map(|p| p.1[k]).collect::<Vec<_>>()))
        .unzip();
    Ok(SeqRisk {
        mc_risk,
        std_error,
        oracle_risk: exp.oracle_risk(),
        block_risk,
        block_std_error,
        replications: totals,
    })
}

impl SeqRisk {
    /// CSV with columns `replication, risk`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["replication", "risk"])?;
        for (i, r) in self.replications.iter().enumerate() {
            w.write_record([i.to_string(), r.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
