//! Per-block oracle-inequality terms and their aggregates.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{g_factor, g_from_lambdas, lambdas, seq_lower_bound, stirling_factors, Lambda1Form, UniversalConstants};
use crate::distributions::{
    block_pair_functionals, energy_d, tail_energy, true_block_energies, true_block_energy, DistributionSpec,
    LevelSetProfile,
};
use crate::error::{Error, Result};
use crate::estimator::oracle_weight;
use crate::schedule::BlockSchedule;

/// Per-block free parameters `ν_k` and `q_k`; `None` selects the defaults
/// `ν_k = 1/ln(L_k + 3)` and `q_k = 1/4`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParameters {
    #[serde(default)]
    pub nu: Option<Vec<f64>>,
    #[serde(default)]
    pub q: Option<Vec<f64>>,
    #[serde(default)]
    pub lambda1_form: Lambda1Form,
}

impl FreeParameters {
    fn nu(&self, i: usize, l: f64) -> Result<f64> {
        pick(&self.nu, i, "nu").map(|v| v.unwrap_or(1.0 / (l + 3.0).ln()))
    }

    fn q(&self, i: usize) -> Result<f64> {
        pick(&self.q, i, "q").map(|v| v.unwrap_or(0.25))
    }
}

fn pick(values: &Option<Vec<f64>>, i: usize, name: &str) -> Result<Option<f64>> {
    match values {
        None => Ok(None),
        Some(v) => v
            .get(i)
            .copied()
            .map(Some)
            .ok_or_else(|| Error::domain(format!("{name} has {} entries, block {} requested", v.len(), i + 1))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundModel {
    /// Density (and cf) estimation with the `λ`/`G` remainder.
    Density,
    /// Gaussian-shift sequence model.
    Sequence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockBound {
    pub k: usize,
    pub length: f64,
    pub threshold: f64,
    /// `‖θ‖²_k`.
    pub true_energy: f64,
    /// Oracle weight.
    pub mu: f64,
    pub nu: f64,
    pub q: f64,
    /// `d*(f, L_k)` (density model only).
    pub d_star: Option<f64>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub lambda3: Option<f64>,
    pub g: Option<f64>,
    /// Multiplicative term: `D'_k` (density) or `D*_k` (sequence).
    pub d_prime: f64,
    /// Remainder term: `D''_k` (density) or `D**_k` (sequence).
    pub d_dblprime: f64,
    /// `d_prime` with `μ_k` and indicators replaced by 1.
    pub d_prime_bar: f64,
    /// `d_dblprime` with `μ_k` and indicators replaced by 1.
    pub d_dblprime_bar: f64,
    pub oracle_risk: f64,
    /// `oracle_risk + n^{-1} L_k [μ_k d_prime + d_dblprime]`.
    pub rhs: f64,
    /// Exponential lower bound for a null block (sequence model, `‖θ‖_k = 0`).
    pub lower_bound: Option<f64>,
}

/// Whole-vector forms of the inequality. Block indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    /// `Σ_{k<=K} oracle_risk_k + Σ_{k>K} ‖θ‖²_k`.
    pub oracle_total: f64,
    /// Sum form: `oracle_total + n^{-1} Σ L_k[μ_k D'_k + D''_k]`.
    pub rhs_total: f64,
    /// `Δ_m = max_{m<=k<=K} D'_k` for `m = 1..=K`.
    pub delta: Vec<f64>,
    /// `S_m = Σ_{k=m}^K L_k D''_k`.
    pub s: Vec<f64>,
    /// `Υ_0 = {k : μ_k D'_k + D''_k >= 1}`.
    pub upsilon0: Vec<usize>,
    /// Split form, minimised over `m`.
    pub rhs_split: f64,
    pub best_m: usize,
    pub delta_bar: Vec<f64>,
    pub s_bar: Vec<f64>,
    /// `Ῡ_0 = {k : D̄'_k + D̄''_k >= 1}`.
    pub upsilon0_bar: Vec<usize>,
    /// Bound for the estimator that uses `y` on `Ῡ_0` and the truth elsewhere.
    pub rhs_modified: f64,
    pub best_m_bar: usize,
    /// `Σ_k L_k D''_k`.
    pub remainder_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub model: BoundModel,
    pub n: usize,
    pub constants: UniversalConstants,
    pub lambda1_form: Lambda1Form,
    /// `d = \int |h|^2` (density model only).
    pub d: Option<f64>,
    pub blocks: Vec<BlockBound>,
    pub aggregate: Aggregates,
}

fn suffix_max(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    for i in (0..v.len().saturating_sub(1)).rev() {
        out[i] = out[i].max(out[i + 1]);
    }
    out
}

fn suffix_sum(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    for i in (0..v.len().saturating_sub(1)).rev() {
        out[i] += out[i + 1];
    }
    out
}

fn split_min(delta: &[f64], s: &[f64], lengths: &[f64], oracle: f64, n: f64) -> (f64, usize) {
    let mut head = 0.0;
    let mut best = (f64::INFINITY, 0);
    for m in 0..delta.len() {
        let v = (1.0 + delta[m]) * oracle + (s[m] + head) / n;
        if v < best.0 {
            best = (v, m + 1);
        }
        head += lengths[m];
    }
    best
}

pub(crate) fn aggregate(blocks: &[BlockBound], oracle_total: f64, n: f64) -> Aggregates {
    let lengths: Vec<f64> = blocks.iter().map(|b| b.length).collect();
    let rem = |b: &BlockBound| b.mu * b.d_prime + b.d_dblprime;
    let excess: f64 = blocks.iter().map(|b| b.length * rem(b)).sum();
    let delta = suffix_max(&blocks.iter().map(|b| b.d_prime).collect::<Vec<_>>());
    let s = suffix_sum(&blocks.iter().map(|b| b.length * b.d_dblprime).collect::<Vec<_>>());
    let upsilon0: Vec<usize> = blocks.iter().filter(|b| rem(b) >= 1.0).map(|b| b.k).collect();
    let (split, best_m) = split_min(&delta, &s, &lengths, oracle_total, n);
    let upsilon_excess: f64 = blocks
        .iter()
        .filter(|b| rem(b) >= 1.0)
        .map(|b| b.length * rem(b))
        .sum();
    let delta_bar = suffix_max(&blocks.iter().map(|b| b.d_prime_bar).collect::<Vec<_>>());
    let s_bar = suffix_sum(&blocks.iter().map(|b| b.length * b.d_dblprime_bar).collect::<Vec<_>>());
    let upsilon0_bar: Vec<usize> = blocks
        .iter()
        .filter(|b| b.d_prime_bar + b.d_dblprime_bar >= 1.0)
        .map(|b| b.k)
        .collect();
    let (modified, best_m_bar) = split_min(&delta_bar, &s_bar, &lengths, oracle_total, n);
    let upsilon_bar_len: f64 = upsilon0_bar.iter().map(|&k| lengths[k - 1]).sum();
    Aggregates {
        oracle_total,
        rhs_total: oracle_total + excess / n,
        delta,
        s,
        upsilon0,
        rhs_split: split + upsilon_excess / n,
        best_m,
        delta_bar,
        s_bar,
        upsilon0_bar,
        rhs_modified: modified + upsilon_bar_len / n,
        best_m_bar,
        remainder_sum: blocks.iter().map(|b| b.length * b.d_dblprime).sum(),
    }
}

/// Density-model multiplicative term `D'_k`; `indicator` is
/// `‖θ‖²_k < 2 L_k t_k / n` (or `true` for the barred form with `mu = 1`).
#[allow(clippy::too_many_arguments)]
pub fn density_d_prime(l: f64, t: f64, d: f64, nu: f64, mu: f64, theta2: f64, indicator: bool) -> f64 {
    let bracket = l.powf(-0.5) * (15.0 * d.sqrt() + 3.0 * d * (1.0 + l.powf(-0.5))) * (1.0 + 1.0 / t)
        + if indicator { (mu * (1.0 + t)).min(2.0 * t) } else { 0.0 };
    nu * (1.0 - mu * theta2 / l) + (1.0 + 1.0 / nu) * bracket
}

/// Density-model remainder term `D''_k`; `indicator` is `‖θ‖²_k < L_k^{1/2} t_k / n`.
pub fn density_d_dblprime(l: f64, t: f64, d: f64, nu: f64, g: f64, indicator: bool) -> f64 {
    if !indicator {
        return 0.0;
    }
    (1.0 + 1.0 / nu) * ((d + 3.0 * d.sqrt() * t) / l).sqrt() * g
}

/// Block-by-block oracle inequality for the density (and cf) estimator,
/// with indicators evaluated from the true block energies of `spec`.
pub fn density_bound_report(
    spec: &DistributionSpec,
    schedule: &BlockSchedule,
    params: &FreeParameters,
    consts: &UniversalConstants,
) -> Result<BoundReport> {
    spec.validate()?;
    consts.validate()?;
    let n = schedule.n as f64;
    let d = energy_d(spec);
    let profile = LevelSetProfile::new(spec);
    let bounds = &schedule.boundaries[..=schedule.cutoff];
    let energies = true_block_energies(spec, bounds);
    let mut blocks = Vec::with_capacity(schedule.cutoff);
    for i in 0..schedule.cutoff {
        let (l, t, theta2) = (schedule.lengths[i], schedule.thresholds[i], energies[i]);
        let nu = params.nu(i, l)?;
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::domain(format!("nu_{} = {nu} must lie in (0, 1)", i + 1)));
        }
        let q = params.q(i)?;
        let ds = profile.d_star(l)?;
        let lam = lambdas(l, t, d, ds, n, consts, params.lambda1_form)?;
        let g = g_from_lambdas(l, t, lam, consts);
        let mu = oracle_weight(theta2, l, n);
        let d_prime = density_d_prime(l, t, d, nu, mu, theta2, theta2 < 2.0 * l * t / n);
        let d_dblprime = density_d_dblprime(l, t, d, nu, g, theta2 < l.sqrt() * t / n);
        let oracle_risk = l * mu * (1.0 - mu * theta2 / l) / n;
        blocks.push(BlockBound {
            k: i + 1,
            length: l,
            threshold: t,
            true_energy: theta2,
            mu,
            nu,
            q,
            d_star: Some(ds),
            lambda1: Some(lam.0),
            lambda2: Some(lam.1),
            lambda3: Some(lam.2),
            g: Some(g),
            d_prime,
            d_dblprime,
            d_prime_bar: density_d_prime(l, t, d, nu, 1.0, theta2, true),
            d_dblprime_bar: density_d_dblprime(l, t, d, nu, g, true),
            oracle_risk,
            rhs: oracle_risk + l / n * (mu * d_prime + d_dblprime),
            lower_bound: None,
        });
    }
    let oracle_total = blocks.iter().map(|b| b.oracle_risk).sum::<f64>() + tail_energy(spec, schedule.upper());
    let aggregate = aggregate(&blocks, oracle_total, n);
    Ok(BoundReport {
        model: BoundModel::Density,
        n: schedule.n,
        constants: *consts,
        lambda1_form: params.lambda1_form,
        d: Some(d),
        blocks,
        aggregate,
    })
}

/// Sequence-model multiplicative term; `indicators = false` replaces the
/// indicator by 1 (pass `mu = 1` for the barred form).
#[allow(clippy::too_many_arguments)]
pub fn seq_d_star(l: f64, t: f64, nu: f64, q: f64, mu: f64, theta2: f64, n: f64, c0: f64, indicators: bool) -> f64 {
    let first = c0.sqrt() / l * (1.0 + 1.0 / ((1.0 - q.sqrt()).powi(2) * t));
    let second = c0 * mu * (l * t * t).powi(-2) * (1.0 + 2.0 * t).powi(3);
    let third = if !indicators || theta2 < 2.0 * l * t / n {
        (mu * (1.0 + t)).min(2.0 * t)
    } else {
        0.0
    };
    nu + (1.0 + 1.0 / nu) * (first + second + third)
}

/// Sequence-model remainder term; `indicators = false` drops the indicator.
#[allow(clippy::too_many_arguments)]
pub fn seq_d_dblstar(l: f64, t: f64, nu: f64, q: f64, theta2: f64, n: f64, s_star: f64, indicators: bool) -> f64 {
    if indicators && theta2 >= (1.0 - q.sqrt()).powi(2) * l * t / n {
        return 0.0;
    }
    let lead = (1.0 + 1.0 / nu) / l * (l.sqrt() / s_star + 8.0 * ((l * t).powf(-0.25) + (l * t * t).powf(-0.5)));
    let qt = q * t;
    lead * (-l * (qt - qt.ln_1p()) / 2.0).exp()
}

/// Sequence-model oracle inequality for blocks with `0 < t_k <= 1`.
/// `tail` is `Σ_{k>K} ‖θ‖²_k`.
pub fn seq_bound_report(
    theta_block_energies: &[f64],
    tail: f64,
    schedule: &BlockSchedule,
    params: &FreeParameters,
    consts: &UniversalConstants,
) -> Result<BoundReport> {
    consts.validate()?;
    if theta_block_energies.len() < schedule.cutoff {
        return Err(Error::domain(format!(
            "{} block energies for {} blocks",
            theta_block_energies.len(),
            schedule.cutoff
        )));
    }
    let n = schedule.n as f64;
    let mut blocks = Vec::with_capacity(schedule.cutoff);
    for i in 0..schedule.cutoff {
        let (l, t, theta2) = (schedule.lengths[i], schedule.thresholds[i], theta_block_energies[i]);
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain(format!("t_{} = {t} is outside (0, 1]", i + 1)));
        }
        let q = params.q(i)?;
        if !(q >= 0.25 && q < 1.0f64.min(0.25 / t)) {
            return Err(Error::domain(format!(
                "q_{} = {q} is outside [1/4, min(1, 1/(4t))) for t = {t}",
                i + 1
            )));
        }
        let nu = params.nu(i, l)?;
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::domain(format!("nu_{} = {nu} must be positive", i + 1)));
        }
        let s_star = stirling_factors(l)?.s_star;
        let mu = oracle_weight(theta2, l, n);
        let d_prime = seq_d_star(l, t, nu, q, mu, theta2, n, consts.c0, true);
        let d_dblprime = seq_d_dblstar(l, t, nu, q, theta2, n, s_star, true);
        let oracle_risk = l * mu / n;
        blocks.push(BlockBound {
            k: i + 1,
            length: l,
            threshold: t,
            true_energy: theta2,
            mu,
            nu,
            q,
            d_star: None,
            lambda1: None,
            lambda2: None,
            lambda3: None,
            g: None,
            d_prime,
            d_dblprime,
            d_prime_bar: seq_d_star(l, t, nu, q, 1.0, theta2, n, consts.c0, false),
            d_dblprime_bar: seq_d_dblstar(l, t, nu, q, theta2, n, s_star, false),
            oracle_risk,
            rhs: oracle_risk + l / n * (mu * d_prime + d_dblprime),
            lower_bound: if theta2 == 0.0 {
                Some(seq_lower_bound(l, t, n)?)
            } else {
                None
            },
        });
    }
    let oracle_total = blocks.iter().map(|b| b.oracle_risk).sum::<f64>() + tail;
    let aggregate = aggregate(&blocks, oracle_total, n);
    Ok(BoundReport {
        model: BoundModel::Sequence,
        n: schedule.n,
        constants: *consts,
        lambda1_form: params.lambda1_form,
        d: None,
        blocks,
        aggregate,
    })
}

/// Bound on `E\int (f̄_S - f̃)^2`, the squared distance between the Stein
/// and EP density estimates.
pub fn stein_gap_bound(
    spec: &DistributionSpec,
    schedule: &BlockSchedule,
    consts: &UniversalConstants,
    form: Lambda1Form,
) -> Result<f64> {
    spec.validate()?;
    let n = schedule.n as f64;
    let d = energy_d(spec);
    let profile = LevelSetProfile::new(spec);
    let energies = true_block_energies(spec, &schedule.boundaries[..=schedule.cutoff]);
    let mut first = 0.0;
    let mut second = 0.0;
    for i in 0..schedule.cutoff {
        let (l, t, theta2) = (schedule.lengths[i], schedule.thresholds[i], energies[i]);
        let mu = oracle_weight(theta2, l, n);
        let shrink = (1.0 - (l + 1.0).powf(-0.5)).powi(-2);
        let keep = if theta2 >= 0.5 * l * t / n { 2.0 * t } else { 0.0 };
        first += l * mu * (12.0 * l.powf(-0.5) * shrink * (d.sqrt() + d / t * (1.0 + l.powf(-0.5))) + keep);
        if theta2 < 0.5 * l.sqrt() * t / n {
            let g = g_factor(l, t / 2.0, d, profile.d_star(l)?, n, consts, form)?;
            second += l * t * t / (1.0 + t) * g * g;
        }
    }
    Ok((first + second) / (PI * n))
}

/// `E(Θ̂ - Θ)^2 <= L^{-1} n^{-1} [2 d1 Θ + d2 n^{-1}]`.
pub fn moment_bound_from(d1: f64, d2: f64, theta: f64, l: f64, n: f64) -> f64 {
    (2.0 * d1 * theta + d2 / n) / (l * n)
}

/// The moment bound for block `[a, b)` of `spec` at sample size `n`.
pub fn moment_bound(spec: &DistributionSpec, a: f64, b: f64, n: f64) -> Result<f64> {
    let (d1, d2) = block_pair_functionals(spec, a, b)?;
    let l = b - a;
    let theta = true_block_energy(spec, a, b) / l;
    Ok(moment_bound_from(d1, d2, theta, l, n))
}

impl BoundReport {
    /// One row per block and a final `total` row; the constants are written
    /// as a leading comment line.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &str) -> Result<()> {
        writeln!(
            out,
            "# {header} c1={} c2={} C0={} lambda1_form={:?}",
            self.constants.c1, self.constants.c2, self.constants.c0, self.lambda1_form
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "k", "L", "t", "theta2", "mu", "nu", "q", "d_star", "lambda1", "lambda2", "lambda3", "G", "D_prime",
            "D_dblprime", "oracle_risk", "rhs", "lower_bound",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for b in &self.blocks {
            w.write_record([
                b.k.to_string(),
                b.length.to_string(),
                b.threshold.to_string(),
                b.true_energy.to_string(),
                b.mu.to_string(),
                b.nu.to_string(),
                b.q.to_string(),
                opt(b.d_star),
                opt(b.lambda1),
                opt(b.lambda2),
                opt(b.lambda3),
                opt(b.g),
                b.d_prime.to_string(),
                b.d_dblprime.to_string(),
                b.oracle_risk.to_string(),
                b.rhs.to_string(),
                opt(b.lower_bound),
            ])?;
        }
        let a = &self.aggregate;
        let mut total = vec![String::new(); 17];
        total[0] = "total".into();
        total[14] = a.oracle_total.to_string();
        total[15] = a.rhs_total.to_string();
        w.write_record(&total)?;
        w.flush()?;
        Ok(())
    }
}
