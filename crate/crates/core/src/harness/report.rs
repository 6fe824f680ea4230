use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{config_hash, ExperimentResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    /// The full nested result.
    Json,
    /// Flat per-replication, per-block and summary tables.
    Csv,
    /// Whitespace-separated two-column series.
    Plotdata,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "plotdata" | "plot" => Ok(ReportFormat::Plotdata),
            other => Err(Error::Usage(format!("unknown format `{other}` (expected json, csv or plotdata)"))),
        }
    }
}

fn create(dir: &Path, name: String) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

fn hash_line<W: Write>(w: &mut W, hash: &str) -> Result<()> {
    writeln!(w, "# config_hash={hash}")?;
    Ok(())
}

/// Writes `result` in `format` under `dir`, returning the paths written.
pub fn emit_report(result: &ExperimentResult, format: ReportFormat, dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    let hash = &result.metadata.config_hash;
    let labels: Vec<&str> = result.estimators.iter().map(|s| s.kind.label()).collect();
    let mut written = Vec::new();
    match format {
        ReportFormat::Json => {
            let (path, mut w) = create(dir, format!("{prefix}.json"))?;
            serde_json::to_writer_pretty(&mut w, result)?;
            writeln!(w)?;
            w.flush()?;
            written.push(path);
        }
        ReportFormat::Csv => {
            let (path, mut w) = create(dir, format!("{prefix}_replications.csv"))?;
            hash_line(&mut w, hash)?;
            {
                let mut c = csv::Writer::from_writer(&mut w);
                let mut header = vec!["replication".to_string()];
                header.extend(labels.iter().map(|l| format!("ise_{l}")));
                c.write_record(&header)?;
                for r in &result.replications {
                    let mut row = vec![r.replication.to_string()];
                    row.extend(r.ise.iter().map(f64::to_string));
                    c.write_record(&row)?;
                }
                c.flush()?;
            }
            w.flush()?;
            written.push(path);

            let (path, mut w) = create(dir, format!("{prefix}_blocks.csv"))?;
            hash_line(&mut w, hash)?;
            {
                let mut c = csv::Writer::from_writer(&mut w);
                let mut header: Vec<String> =
                    ["k", "lo", "hi", "length", "threshold", "true_energy", "oracle_mise"].map(String::from).to_vec();
                for l in &labels {
                    header.push(format!("mise_{l}"));
                    header.push(format!("se_{l}"));
                }
                c.write_record(&header)?;
                for (i, b) in result.blocks.iter().enumerate() {
                    let mut row = vec![
                        b.k.to_string(),
                        b.lo.to_string(),
                        b.hi.to_string(),
                        b.length.to_string(),
                        b.threshold.to_string(),
                        b.true_energy.to_string(),
                        b.oracle_mise.to_string(),
                    ];
                    for s in &result.estimators {
                        row.push(s.per_block_mise[i].to_string());
                        row.push(s.per_block_std_error[i].to_string());
                    }
                    c.write_record(&row)?;
                }
                c.flush()?;
            }
            w.flush()?;
            written.push(path);

            let (path, mut w) = create(dir, format!("{prefix}_summary.csv"))?;
            hash_line(&mut w, hash)?;
            {
                let mut c = csv::Writer::from_writer(&mut w);
                c.write_record(["estimator", "mise", "std_error", "oracle_mise", "tail_bias", "benchmark"])?;
                let bench = result.benchmark.as_ref().map(|b| b.density.to_string()).unwrap_or_default();
                for s in &result.estimators {
                    c.write_record([
                        s.kind.label().to_string(),
                        s.mise.to_string(),
                        s.std_error.to_string(),
                        result.oracle_mise.to_string(),
                        result.tail_bias.to_string(),
                        bench.clone(),
                    ])?;
                }
                c.flush()?;
            }
            w.flush()?;
            written.push(path);

            if let Some(bounds) = &result.bound_report {
                let (path, mut w) = create(dir, format!("{prefix}_bounds.csv"))?;
                bounds.write_csv(&mut w, &format!("config_hash={hash}"))?;
                w.flush()?;
                written.push(path);
            }
        }
        ReportFormat::Plotdata => {
            for s in &result.estimators {
                let (path, mut w) = create(dir, format!("{prefix}_{}_blocks.dat", s.kind.label()))?;
                hash_line(&mut w, hash)?;
                writeln!(w, "hi mise")?;
                for (b, v) in result.blocks.iter().zip(&s.per_block_mise) {
                    writeln!(w, "{} {}", b.hi, v)?;
                }
                w.flush()?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

/// `n mise` series, one file per estimator, for a sweep over sample sizes.
pub fn emit_sweep_plotdata(results: &[ExperimentResult], dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    let first = results.first().ok_or_else(|| Error::Usage("empty sweep".into()))?;
    let configs: Vec<_> = results.iter().map(|r| &r.config).collect();
    let hash = config_hash(&configs);
    let mut written = Vec::new();
    for s in &first.estimators {
        let (path, mut w) = create(dir, format!("{prefix}_{}_rate.dat", s.kind.label()))?;
        hash_line(&mut w, &hash)?;
        writeln!(w, "n mise")?;
        for r in results {
            let v = r
                .summary(s.kind)
                .ok_or_else(|| Error::config("sweep results disagree on estimators"))?;
            writeln!(w, "{} {}", r.metadata.n, v.mise)?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}
