//! Command-line front end: `estimate`, `simulate`, `bounds`, `seqmodel`,
//! `benchmark`.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{config_hash, emit_report, emit_sweep_plotdata, rate_sweep, run_experiment, ExperimentConfig, ReportFormat};
use crate::bounds::{
    density_bound_report, minimax_benchmark, seq_bound_report, BoundModel, BoundReport, FreeParameters, Target,
    UniversalConstants,
};
use crate::distributions::{sample, DistributionSpec, FunctionClass};
use crate::error::{Error, Result};
use crate::estimator::{
    assemble_cf, density_grid, nonneg_project, profile_for, write_density_csv, EstimatorKind, Grid, SpectralTruth,
};
use crate::sample::Sample;
use crate::schedule::{build_schedule, build_schedule_with, Lengths, Portfolio};
use crate::seqmodel::{seq_risks, upsilon0_bar, SeqEstimator, SeqExperiment, SeqRisk};
use crate::spectral::{BlockStats, EnergyMethod};

#[derive(Debug, Parser)]
#[command(name = "blockshrink", version, about = "Blockwise-shrinkage density and cf estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density and cf estimate from one sample file or a generated sample.
    Estimate {
        #[command(flatten)]
        common: CommonArgs,
        /// Sample file: one value per line, `#` comments allowed.
        #[arg(long)]
        sample: Option<PathBuf>,
    },
    /// Monte Carlo MISE experiment.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated sample sizes; runs a rate sweep instead.
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<usize>,
    },
    /// Bound report only.
    Bounds {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Gaussian sequence-model experiment.
    Seqmodel {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sharp minimax benchmarks.
    Benchmark {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config; unknown keys are rejected.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// json, csv or plotdata; repeat or separate with commas.
    #[arg(long, value_delimiter = ',')]
    pub format: Vec<String>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl CommonArgs {
    fn formats(&self) -> Result<Option<Vec<ReportFormat>>> {
        if self.format.is_empty() {
            return Ok(None);
        }
        self.format.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>().map(Some)
    }

    fn load<T: DeserializeOwned>(&self) -> Result<Option<T>> {
        match &self.config {
            None => Ok(None),
            Some(path) => {
                let text = fs::read_to_string(path)?;
                serde_json::from_str(&text)
                    .map(Some)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
            }
        }
    }

    fn require<T: DeserializeOwned>(&self, command: &str) -> Result<T> {
        self.load()?
            .ok_or_else(|| Error::Usage(format!("`{command}` needs --config <path>")))
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<Vec<PathBuf>> {
    let common = match &command {
        Command::Estimate { common, .. }
        | Command::Simulate { common, .. }
        | Command::Bounds { common }
        | Command::Seqmodel { common }
        | Command::Benchmark { common } => common,
    };
    if let Some(threads) = common.threads {
        if threads == 0 {
            return Err(Error::Usage("--threads must be positive".into()));
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match &command {
        Command::Estimate { common, sample } => estimate(common, sample.as_deref()),
        Command::Simulate { common, sweep } => simulate(common, sweep),
        Command::Bounds { common } => bounds(common),
        Command::Seqmodel { common } => seqmodel(common),
        Command::Benchmark { common } => benchmark(common),
    }
}

fn out_dir(common: &CommonArgs, fallback: &Path) -> PathBuf {
    common.out_dir.clone().unwrap_or_else(|| fallback.to_path_buf())
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    Ok((path.clone(), BufWriter::new(File::create(path)?)))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let (path, mut w) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}

fn simulate(common: &CommonArgs, sweep: &[usize]) -> Result<Vec<PathBuf>> {
    let mut cfg: ExperimentConfig = common.require("simulate")?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = common.reps {
        cfg.replications = reps;
    }
    if let Some(dir) = &common.out_dir {
        cfg.outputs.dir = dir.clone();
    }
    if let Some(formats) = common.formats()? {
        cfg.outputs.formats = formats;
    }
    cfg.validate()?;
    let dir = cfg.outputs.dir.clone();
    let prefix = cfg.outputs.prefix.clone();
    let mut written = Vec::new();
    if sweep.is_empty() {
        let result = run_experiment(&cfg)?;
        for &f in &cfg.outputs.formats {
            written.extend(emit_report(&result, f, &dir, &prefix)?);
        }
    } else {
        let results = rate_sweep(&cfg, sweep)?;
        for (r, &n) in results.iter().zip(sweep) {
            for &f in &cfg.outputs.formats {
                written.extend(emit_report(r, f, &dir, &format!("{prefix}_n{n}"))?);
            }
        }
        written.extend(emit_sweep_plotdata(&results, &dir, &prefix)?);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    /// Sample file; otherwise `n` draws from `spec`.
    #[serde(default)]
    pub sample_file: Option<PathBuf>,
    #[serde(default)]
    pub spec: Option<DistributionSpec>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub portfolio: Portfolio,
    #[serde(default = "default_estimator")]
    pub estimator: EstimatorKind,
    /// Defaults to the covering grid of the sample.
    #[serde(default)]
    pub grid: Option<Grid>,
    /// Clip negative values and renormalize.
    #[serde(default)]
    pub nonneg: bool,
    #[serde(default = "default_cf_points")]
    pub cf_points: usize,
    #[serde(default)]
    pub energy_method: EnergyMethod,
}

fn default_estimator() -> EstimatorKind {
    EstimatorKind::Ep
}

fn default_cf_points() -> usize {
    512
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            sample_file: None,
            spec: None,
            n: None,
            seed: 0,
            portfolio: Portfolio::default(),
            estimator: default_estimator(),
            grid: None,
            nonneg: false,
            cf_points: default_cf_points(),
            energy_method: EnergyMethod::default(),
        }
    }
}

#[derive(Debug, Serialize)]
struct EstimateSummary {
    config_hash: String,
    n: usize,
    estimator: EstimatorKind,
    cutoff: usize,
    boundaries: Vec<f64>,
    energies: Vec<f64>,
    weights: Vec<f64>,
}

fn estimate(common: &CommonArgs, sample_path: Option<&Path>) -> Result<Vec<PathBuf>> {
    let mut cfg: EstimateConfig = common.load()?.unwrap_or_default();
    if let Some(p) = sample_path {
        cfg.sample_file = Some(p.to_path_buf());
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let data = match (&cfg.sample_file, &cfg.spec, cfg.n) {
        (Some(path), _, _) => Sample::read(path)?,
        (None, Some(spec), Some(n)) => sample(spec, n, cfg.seed)?,
        _ => return Err(Error::Usage("`estimate` needs --sample or a config with spec and n".into())),
    };
    if data.len() <= 3 {
        return Err(Error::config(format!("sample of size {} is too small", data.len())));
    }
    let schedule = build_schedule(&cfg.portfolio, data.len())?;
    let stats = BlockStats::compute(&data, &schedule, cfg.energy_method)?;
    let truth = match (&cfg.spec, cfg.estimator) {
        (Some(spec), _) => Some(SpectralTruth::new(spec, &schedule)?),
        (None, EstimatorKind::Oracle) => return Err(Error::config("the oracle estimator needs `spec`")),
        (None, _) => None,
    };
    let true_energies = truth.map(|t| t.true_energies).unwrap_or_default();
    let profile = profile_for(cfg.estimator, &stats, &schedule, &true_energies);
    let est = assemble_cf(&profile, &data);
    let grid = cfg.grid.unwrap_or_else(|| Grid::covering(&data));
    let mut density = density_grid(&est, &grid);
    if cfg.nonneg {
        density = nonneg_project(&density)?;
    }
    if density.iter().any(|(_, v)| !v.is_finite()) {
        return Err(Error::Numeric("density estimate is not finite".into()));
    }
    let hash = config_hash(&cfg);
    let dir = out_dir(common, Path::new("out"));
    let formats = common.formats()?.unwrap_or_else(|| vec![ReportFormat::Json, ReportFormat::Csv]);
    let mut written = Vec::new();
    for f in formats {
        match f {
            ReportFormat::Json => {
                let summary = EstimateSummary {
                    config_hash: hash.clone(),
                    n: data.len(),
                    estimator: cfg.estimator,
                    cutoff: schedule.cutoff,
                    boundaries: profile.boundaries.clone(),
                    energies: stats.energies(),
                    weights: profile.weights.clone(),
                };
                written.push(write_json(&dir, "estimate.json", &summary)?);
            }
            ReportFormat::Csv => {
                let (p, mut w) = create(&dir, "estimate_density.csv")?;
                writeln!(w, "# config_hash={hash}")?;
                write_density_csv(&density, &mut w)?;
                w.flush()?;
                written.push(p);
                let (p, mut w) = create(&dir, "estimate_cf.csv")?;
                writeln!(w, "# config_hash={hash}")?;
                let m = cfg.cf_points.max(2);
                let upper = profile.upper();
                let us: Vec<f64> = (0..m).map(|i| upper * i as f64 / (m - 1) as f64).collect();
                est.write_csv(&us, &mut w)?;
                w.flush()?;
                written.push(p);
                let (p, mut w) = create(&dir, "estimate_weights.csv")?;
                writeln!(w, "# config_hash={hash}")?;
                profile.write_csv(&mut w)?;
                w.flush()?;
                written.push(p);
            }
            ReportFormat::Plotdata => {
                let (p, mut w) = create(&dir, "estimate_density.dat")?;
                writeln!(w, "# config_hash={hash}")?;
                writeln!(w, "x f_hat")?;
                for (x, v) in &density {
                    writeln!(w, "{x} {v}")?;
                }
                w.flush()?;
                written.push(p);
            }
        }
    }
    Ok(written)
}

/// Coefficients of a sequence-model experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ThetaSpec {
    List { values: Vec<f64> },
    /// `θ_j = scale · j^{-exponent}`, `j = 1..=count`.
    Power {
        exponent: f64,
        count: usize,
        #[serde(default = "unit")]
        scale: f64,
    },
    Zero { count: usize },
}

fn unit() -> f64 {
    1.0
}

impl ThetaSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            ThetaSpec::List { values } => values.clone(),
            ThetaSpec::Power { exponent, count, scale } => {
                (1..=*count).map(|j| scale * (j as f64).powf(-exponent)).collect()
            }
            ThetaSpec::Zero { count } => vec![0.0; *count],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqKind {
    Ep,
    Stein,
    Oracle,
    /// Observations on the blocks where the barred remainders reach 1.
    Modified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqConfig {
    pub theta: ThetaSpec,
    pub n: usize,
    #[serde(default)]
    pub portfolio: Portfolio,
    #[serde(default = "default_seq_reps")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_seq_kinds")]
    pub estimators: Vec<SeqKind>,
    #[serde(default)]
    pub constants: UniversalConstants,
    #[serde(default)]
    pub free_parameters: FreeParameters,
}

fn default_seq_reps() -> usize {
    1000
}

fn default_seq_kinds() -> Vec<SeqKind> {
    vec![SeqKind::Ep, SeqKind::Stein, SeqKind::Oracle]
}

#[derive(Debug, Serialize)]
struct SeqSummary {
    config_hash: String,
    config: SeqConfig,
    cutoff: usize,
    results: Vec<(SeqKind, SeqRisk)>,
    bound_report: Option<BoundReport>,
}

fn seqmodel(common: &CommonArgs) -> Result<Vec<PathBuf>> {
    let mut cfg: SeqConfig = common.require("seqmodel")?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = common.reps {
        cfg.replications = reps;
    }
    if cfg.n <= 3 {
        return Err(Error::config(format!("n = {} must exceed 3", cfg.n)));
    }
    let exp = SeqExperiment::new(cfg.theta.values(), cfg.n, &cfg.portfolio, cfg.seed)?;
    // The bound report needs every t_k <= 1; leave it out otherwise.
    let report = seq_bound_report(
        &exp.block_energies(),
        exp.tail_energy(),
        &exp.schedule,
        &cfg.free_parameters,
        &cfg.constants,
    )
    .ok();
    let mut results = Vec::new();
    for &kind in &cfg.estimators {
        let estimator = match kind {
            SeqKind::Ep => SeqEstimator::Ep,
            SeqKind::Stein => SeqEstimator::Stein,
            SeqKind::Oracle => SeqEstimator::Oracle,
            SeqKind::Modified => SeqEstimator::Modified(upsilon0_bar(&exp, &cfg.free_parameters, &cfg.constants)?),
        };
        let r = seq_risks(&exp, &estimator, cfg.replications)?;
        if !r.mc_risk.is_finite() {
            return Err(Error::Numeric(format!("{kind:?} risk is not finite")));
        }
        results.push((kind, r));
    }
    let hash = config_hash(&cfg);
    let dir = out_dir(common, Path::new("out"));
    let formats = common.formats()?.unwrap_or_else(|| vec![ReportFormat::Json, ReportFormat::Csv]);
    let label = |k: SeqKind| format!("{k:?}").to_lowercase();
    let mut written = Vec::new();
    for f in formats {
        match f {
            ReportFormat::Json => {
                let summary = SeqSummary {
                    config_hash: hash.clone(),
                    config: cfg.clone(),
                    cutoff: exp.schedule.cutoff,
                    results: results.clone(),
                    bound_report: report.clone(),
                };
                written.push(write_json(&dir, "seqmodel.json", &summary)?);
            }
            ReportFormat::Csv => {
                for (kind, r) in &results {
                    let (p, mut w) = create(&dir, &format!("seqmodel_{}.csv", label(*kind)))?;
                    writeln!(w, "# config_hash={hash}")?;
                    r.write_csv(&mut w)?;
                    w.flush()?;
                    written.push(p);
                }
            }
            ReportFormat::Plotdata => {
                for (kind, r) in &results {
                    let (p, mut w) = create(&dir, &format!("seqmodel_{}_blocks.dat", label(*kind)))?;
                    writeln!(w, "# config_hash={hash}")?;
                    writeln!(w, "k risk")?;
                    for (k, v) in r.block_risk.iter().enumerate() {
                        writeln!(w, "{} {v}", k + 1)?;
                    }
                    w.flush()?;
                    written.push(p);
                }
            }
        }
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    #[serde(default = "default_model")]
    pub model: BoundModel,
    /// Law for the density model.
    #[serde(default)]
    pub spec: Option<DistributionSpec>,
    /// Coefficients for the sequence model.
    #[serde(default)]
    pub theta: Option<ThetaSpec>,
    pub n: usize,
    #[serde(default)]
    pub portfolio: Portfolio,
    #[serde(default)]
    pub constants: UniversalConstants,
    #[serde(default)]
    pub free_parameters: FreeParameters,
}

fn default_model() -> BoundModel {
    BoundModel::Density
}

fn bounds(common: &CommonArgs) -> Result<Vec<PathBuf>> {
    let cfg: BoundsConfig = common.require("bounds")?;
    if cfg.n <= 3 {
        return Err(Error::config(format!("n = {} must exceed 3", cfg.n)));
    }
    let report = match cfg.model {
        BoundModel::Density => {
            let spec = cfg.spec.as_ref().ok_or_else(|| Error::config("the density model needs `spec`"))?;
            let schedule = build_schedule(&cfg.portfolio, cfg.n)?;
            density_bound_report(spec, &schedule, &cfg.free_parameters, &cfg.constants)?
        }
        BoundModel::Sequence => {
            let theta = cfg.theta.as_ref().ok_or_else(|| Error::config("the sequence model needs `theta`"))?;
            let schedule = build_schedule_with(&cfg.portfolio, cfg.n, Lengths::Integer)?;
            let exp = SeqExperiment {
                theta: theta.values(),
                n: cfg.n,
                schedule,
                seed: 0,
            };
            seq_bound_report(
                &exp.block_energies(),
                exp.tail_energy(),
                &exp.schedule,
                &cfg.free_parameters,
                &cfg.constants,
            )?
        }
    };
    let hash = config_hash(&cfg);
    let dir = out_dir(common, Path::new("out"));
    let formats = common.formats()?.unwrap_or_else(|| vec![ReportFormat::Json, ReportFormat::Csv]);
    let mut written = Vec::new();
    for f in formats {
        match f {
            ReportFormat::Json => {
                #[derive(Serialize)]
                struct Out<'a> {
                    config_hash: &'a str,
                    report: &'a BoundReport,
                }
                written.push(write_json(
                    &dir,
                    "bounds.json",
                    &Out {
                        config_hash: &hash,
                        report: &report,
                    },
                )?);
            }
            ReportFormat::Csv => {
                let (p, mut w) = create(&dir, "bounds.csv")?;
                report.write_csv(&mut w, &format!("config_hash={hash}"))?;
                w.flush()?;
                written.push(p);
            }
            ReportFormat::Plotdata => {
                let (p, mut w) = create(&dir, "bounds_rhs.dat")?;
                writeln!(w, "# config_hash={hash}")?;
                writeln!(w, "k rhs")?;
                for b in &report.blocks {
                    writeln!(w, "{} {}", b.k, b.rhs)?;
                }
                w.flush()?;
                written.push(p);
            }
        }
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub classes: Vec<FunctionClass>,
    pub ns: Vec<usize>,
    #[serde(default)]
    pub target: Target,
}

#[derive(Debug, Serialize)]
struct BenchmarkRow {
    class: FunctionClass,
    n: usize,
    value: f64,
}

fn benchmark(common: &CommonArgs) -> Result<Vec<PathBuf>> {
    let cfg: BenchmarkConfig = common.require("benchmark")?;
    let mut rows = Vec::new();
    for class in &cfg.classes {
        for &n in &cfg.ns {
            rows.push(BenchmarkRow {
                class: *class,
                n,
                value: minimax_benchmark(class, n as f64, cfg.target)?,
            });
        }
    }
    let hash = config_hash(&cfg);
    let dir = out_dir(common, Path::new("out"));
    let formats = common.formats()?.unwrap_or_else(|| vec![ReportFormat::Csv]);
    let mut written = Vec::new();
    for f in formats {
        match f {
            ReportFormat::Json => {
                #[derive(Serialize)]
                struct Out<'a> {
                    config_hash: &'a str,
                    target: Target,
                    rows: &'a [BenchmarkRow],
                }
                written.push(write_json(
                    &dir,
                    "benchmark.json",
                    &Out {
                        config_hash: &hash,
                        target: cfg.target,
                        rows: &rows,
                    },
                )?);
            }
            ReportFormat::Csv => {
                let (p, mut w) = create(&dir, "benchmark.csv")?;
                writeln!(w, "# config_hash={hash}")?;
                {
                    let mut c = csv::Writer::from_writer(&mut w);
                    c.write_record(["class", "n", "value"])?;
                    for r in &rows {
                        c.write_record([serde_json::to_string(&r.class)?, r.n.to_string(), r.value.to_string()])?;
                    }
                    c.flush()?;
                }
                w.flush()?;
                written.push(p);
            }
            ReportFormat::Plotdata => {
                for (i, class) in cfg.classes.iter().enumerate() {
                    let (p, mut w) = create(&dir, &format!("benchmark_{i}.dat"))?;
                    writeln!(w, "# config_hash={hash} class={}", serde_json::to_string(class)?)?;
                    writeln!(w, "n value")?;
                    for r in rows.iter().filter(|r| r.class == *class) {
                        writeln!(w, "{} {}", r.n, r.value)?;
                    }
                    w.flush()?;
                    written.push(p);
                }
            }
        }
    }
    Ok(written)
}
