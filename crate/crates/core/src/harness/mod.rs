//! Experiment configuration, Monte Carlo orchestration and report emission.

pub mod cli;
mod report;

pub use report::{emit_report, emit_sweep_plotdata, ReportFormat};

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{density_bound_report, minimax_benchmark, BoundReport, FreeParameters, Target, UniversalConstants};
use crate::distributions::{sample_with, DistributionSpec, FunctionClass};
use crate::error::{ensure_finite, Error, Result};
use crate::estimator::{oracle_block_risk, plancherel_mise, profile_for, EstimatorKind, SpectralTruth};
use crate::sample::replication_rng;
use crate::schedule::{build_schedule, BlockSchedule, Portfolio};
use crate::seqmodel::{mean_and_se, pairwise_sum};
use crate::spectral::{BlockStats, EnergyMethod};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    /// File name stem shared by every report.
    #[serde(default = "default_prefix")]
    pub prefix: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<ReportFormat>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_prefix() -> String {
    "experiment".into()
}

fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Json]
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_out_dir(),
            prefix: default_prefix(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: DistributionSpec,
    #[serde(default)]
    pub portfolio: Portfolio,
    pub n: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Replication indices run are `first_replication..first_replication + replications`.
    #[serde(default)]
    pub first_replication: u64,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorKind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub benchmark_class: Option<FunctionClass>,
    #[serde(default)]
    pub constants: UniversalConstants,
    /// Attach the density bound report.
    #[serde(default)]
    pub bounds: bool,
    #[serde(default)]
    pub free_parameters: FreeParameters,
    #[serde(default)]
    pub energy_method: EnergyMethod,
}

fn default_replications() -> usize {
    100
}

fn default_estimators() -> Vec<EstimatorKind> {
    vec![EstimatorKind::Ep, EstimatorKind::Stein, EstimatorKind::Oracle]
}

impl ExperimentConfig {
    /// A config with defaults for everything but the law and sample size.
    pub fn new(spec: DistributionSpec, n: usize) -> Self {
        ExperimentConfig {
            spec,
            portfolio: Portfolio::default(),
            n,
            replications: default_replications(),
            first_replication: 0,
            estimators: default_estimators(),
            seed: 0,
            outputs: OutputConfig::default(),
            benchmark_class: None,
            constants: UniversalConstants::default(),
            bounds: false,
            free_parameters: FreeParameters::default(),
            energy_method: EnergyMethod::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n <= 3 {
            return Err(Error::config(format!("n = {} must exceed 3", self.n)));
        }
        if self.replications < 1 {
            return Err(Error::config("replications must be at least 1"));
        }
        if self.estimators.is_empty() {
            return Err(Error::config("at least one estimator is required"));
        }
        let mut seen = self.estimators.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.estimators.len() {
            return Err(Error::config("estimators must not repeat"));
        }
        if self.outputs.formats.is_empty() {
            return Err(Error::config("outputs.formats must not be empty"));
        }
        self.spec.validate().map_err(as_config)?;
        self.portfolio.validate()?;
        self.constants.validate().map_err(as_config)?;
        if let Some(class) = &self.benchmark_class {
            class.validate().map_err(as_config)?;
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Config(m),
        other => other,
    }
}

/// Hex SHA-256 of the JSON serialization of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config types serialize");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub kind: EstimatorKind,
    pub mise: f64,
    /// Sample standard deviation over `√replications`.
    pub std_error: f64,
    pub per_block_mise: Vec<f64>,
    pub per_block_std_error: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub replication: u64,
    /// ISE per estimator, in the order of `estimators`.
    pub ise: Vec<f64>,
    /// `π^{-1}\int_{B_k}|μ_k ĥ - h|^2` per estimator and block.
    pub per_block: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub k: usize,
    pub lo: f64,
    pub hi: f64,
    pub length: f64,
    pub threshold: f64,
    pub true_energy: f64,
    /// `π^{-1}` times the oracle block risk.
    pub oracle_mise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub class: FunctionClass,
    pub density: f64,
    pub cf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config_hash: String,
    pub version: String,
    pub spec: String,
    pub n: usize,
    pub seed: u64,
    pub first_replication: u64,
    pub replications: usize,
    pub cutoff: usize,
    pub constants: UniversalConstants,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub metadata: Metadata,
    pub config: ExperimentConfig,
    pub estimators: Vec<EstimatorSummary>,
    /// `π^{-1}[Σ_k oracle block risk + \int_{b_{K+1}}^∞ |h|^2]`.
    pub oracle_mise: f64,
    pub tail_bias: f64,
    pub blocks: Vec<BlockSummary>,
    pub bound_report: Option<BoundReport>,
    pub benchmark: Option<Benchmark>,
    pub replications: Vec<ReplicationRecord>,
}

/// ISE of every configured estimator for one replication.
fn run_replication(
    cfg: &ExperimentConfig,
    schedule: &BlockSchedule,
    truth: &SpectralTruth,
    rep: u64,
) -> Result<ReplicationRecord> {
    let mut rng = replication_rng(cfg.seed, rep);
    let sample = sample_with(&cfg.spec, cfg.n, &mut rng)?;
    let stats = BlockStats::compute(&sample, schedule, cfg.energy_method)?;
    let energies = stats.energies();
    let mut ise = Vec::with_capacity(cfg.estimators.len());
    let mut per_block = Vec::with_capacity(cfg.estimators.len());
    for &kind in &cfg.estimators {
        let profile = profile_for(kind, &stats, schedule, &truth.true_energies);
        let report = plancherel_mise(&profile, &sample, truth, &energies)?;
        ensure_finite(&format!("ISE of {} in replication {rep}", kind.label()), report.mise)?;
        ise.push(report.mise);
        per_block.push(report.per_block);
    }
    Ok(ReplicationRecord {
        replication: rep,
        ise,
        per_block,
    })
}

/// Runs every replication and aggregates. Results do not depend on the
/// number of worker threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let schedule = build_schedule(&cfg.portfolio, cfg.n)?;
    let truth = SpectralTruth::new(&cfg.spec, &schedule)?;
    let first = cfg.first_replication;
    let records = (first..first + cfg.replications as u64)
        .into_par_iter()
        .map(|rep| run_replication(cfg, &schedule, &truth, rep))
        .collect::<Result<Vec<_>>>()?;
    assemble(cfg, &schedule, &truth, records)
}

fn assemble(
    cfg: &ExperimentConfig,
    schedule: &BlockSchedule,
    truth: &SpectralTruth,
    records: Vec<ReplicationRecord>,
) -> Result<ExperimentResult> {
    let n = cfg.n as f64;
    let pi = std::f64::consts::PI;
    let k = schedule.cutoff;
    let blocks: Vec<BlockSummary> = (0..k)
        .map(|i| {
            let (lo, hi) = schedule.block(i);
            let t = truth.true_energies[i];
            BlockSummary {
                k: i + 1,
                lo,
                hi,
                length: schedule.lengths[i],
                threshold: schedule.thresholds[i],
                true_energy: t,
                oracle_mise: oracle_block_risk(t, schedule.lengths[i], n) / pi,
            }
        })
        .collect();
    let tail_bias = truth.tail / pi;
    let oracle_mise = pairwise_sum(&blocks.iter().map(|b| b.oracle_mise).collect::<Vec<_>>()) + tail_bias;

    let estimators = cfg
        .estimators
        .iter()
        .enumerate()
        .map(|(e, &kind)| {
            let ise: Vec<f64> = records.iter().map(|r| r.ise[e]).collect();
            let (mise, std_error) = mean_and_se(&ise);
            let (per_block_mise, per_block_std_error) = (0..k)
                .map(|i| mean_and_se(&records.iter().map(|r| r.per_block[e][i]).collect::<Vec<_>>()))
                .unzip();
            EstimatorSummary {
                kind,
                mise,
                std_error,
                per_block_mise,
                per_block_std_error,
            }
        })
        .collect();

    let bound_report = if cfg.bounds {
        Some(density_bound_report(&cfg.spec, schedule, &cfg.free_parameters, &cfg.constants)?)
    } else {
        None
    };
    let benchmark = match &cfg.benchmark_class {
        Some(class) => Some(Benchmark {
            class: *class,
            density: minimax_benchmark(class, n, Target::Density)?,
            cf: minimax_benchmark(class, n, Target::Cf)?,
        }),
        None => None,
    };

    Ok(ExperimentResult {
        metadata: Metadata {
            config_hash: cfg.hash(),
            version: env!("CARGO_PKG_VERSION").into(),
            spec: cfg.spec.label(),
            n: cfg.n,
            seed: cfg.seed,
            first_replication: cfg.first_replication,
            replications: records.len(),
            cutoff: k,
            constants: cfg.constants,
        },
        config: cfg.clone(),
        estimators,
        oracle_mise,
        tail_bias,
        blocks,
        bound_report,
        benchmark,
        replications: records,
    })
}

impl ExperimentResult {
    /// Merges runs of one config over disjoint replication ranges. The
    /// aggregates equal those of a single run over the union.
    pub fn pool(parts: &[ExperimentResult]) -> Result<ExperimentResult> {
        let first = parts.first().ok_or_else(|| Error::config("nothing to pool"))?;
        let mut base = first.config.clone();
        let mut records: Vec<ReplicationRecord> = Vec::new();
        for p in parts {
            let mut c = p.config.clone();
            c.first_replication = base.first_replication;
            c.replications = base.replications;
            if c != base {
                return Err(Error::config("pooled runs must share every setting but the replication range"));
            }
            records.extend(p.replications.iter().cloned());
        }
        records.sort_by_key(|r| r.replication);
        if records.windows(2).any(|w| w[0].replication == w[1].replication) {
            return Err(Error::config("pooled replication ranges overlap"));
        }
        let contiguous = records.windows(2).all(|w| w[1].replication == w[0].replication + 1);
        if !contiguous {
            return Err(Error::config("pooled replication ranges leave a gap"));
        }
        base.first_replication = records[0].replication;
        base.replications = records.len();
        let schedule = build_schedule(&base.portfolio, base.n)?;
        let truth = SpectralTruth::new(&base.spec, &schedule)?;
        assemble(&base, &schedule, &truth, records)
    }

    pub fn summary(&self, kind: EstimatorKind) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|s| s.kind == kind)
    }
}

/// One experiment per sample size, everything else fixed.
pub fn rate_sweep(base: &ExperimentConfig, ns: &[usize]) -> Result<Vec<ExperimentResult>> {
    ns.iter()
        .map(|&n| {
            let mut cfg = base.clone();
            cfg.n = n;
            run_experiment(&cfg)
        })
        .collect()
}

#[cfg(test)]
mod tests;
