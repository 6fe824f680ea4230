//! Block/threshold portfolios on the frequency half-line and the cutoff rule.

use std::io::Write;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rule generating block lengths `L_k` and thresholds `t_k`, `k = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum Portfolio {
    /// `L_k = ln^3(k+3)`, `t_k = 1/ln(ln(k+3))`.
    #[default]
    LogCubic,
    /// `L_k = first_length * 2^{k-1}`, constant threshold.
    Dyadic { first_length: f64, threshold: f64 },
    /// Explicit lists; the cutoff must be reachable within them.
    Custom { lengths: Vec<f64>, thresholds: Vec<f64> },
}

impl Portfolio {
    pub fn validate(&self) -> Result<()> {
        match self {
            Portfolio::LogCubic => Ok(()),
            Portfolio::Dyadic {
                first_length,
                threshold,
            } => {
                if *first_length > 0.0 && *threshold > 0.0 && first_length.is_finite() && threshold.is_finite() {
                    Ok(())
                } else {
                    Err(Error::config("dyadic portfolio needs positive first_length and threshold"))
                }
            }
            Portfolio::Custom {
                lengths,
                thresholds,
            } => {
                if lengths.is_empty() || lengths.len() != thresholds.len() {
                    return Err(Error::config(
                        "custom portfolio needs nonempty lengths and thresholds of equal size",
                    ));
                }
                if lengths
                    .iter()
                    .chain(thresholds)
                    .any(|&v| !(v > 0.0 && v.is_finite()))
                {
                    return Err(Error::config("custom portfolio entries must be positive"));
                }
                Ok(())
            }
        }
    }

    /// `(L_k, t_k)` for 1-based `k`, or `None` past the end of a custom list.
    pub fn block(&self, k: usize) -> Option<(f64, f64)> {
        assert!(k >= 1, "blocks are numbered from 1");
        match self {
            Portfolio::LogCubic => {
                let ln = (k as f64 + 3.0).ln();
                Some((ln.powi(3), 1.0 / ln.ln()))
            }
            Portfolio::Dyadic {
                first_length,
                threshold,
            } => Some((first_length * 2f64.powi(k as i32 - 1), *threshold)),
            Portfolio::Custom {
                lengths,
                thresholds,
            } => lengths.get(k - 1).map(|&l| (l, thresholds[k - 1])),
        }
    }
}

/// `n^{1 - 1/ln(n+1)}`.
pub fn cutoff_target(n: usize) -> f64 {
    let n = n as f64;
    n.powf(1.0 - 1.0 / (n + 1.0).ln())
}

/// Whether block lengths live on the continuous half-line or count integer
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Lengths {
    #[default]
    Continuous,
    /// `L_k` rounded to the nearest integer, at least 1.
    Integer,
}

/// Blocks `B_k = [b_k, b_{k+1})`, `k = 1..=K`, with thresholds and cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSchedule {
    pub n: usize,
    /// `b_1 = 0 < b_2 < ... < b_{K+1}`.
    pub boundaries: Vec<f64>,
    pub lengths: Vec<f64>,
    pub thresholds: Vec<f64>,
    /// The cutoff `K` (number of estimated blocks).
    pub cutoff: usize,
    /// `(L_{K+1}, t_{K+1})` when the portfolio provides it.
    pub next_block: Option<(f64, f64)>,
    pub target: f64,
    pub kind: Lengths,
}

/// Builds the schedule for sample size `n > 3`: `K` is the largest index with
/// `L_1 + ... + L_K < n^{1-1/ln(n+1)}`, but at least 1.
pub fn build_schedule(portfolio: &Portfolio, n: usize) -> Result<BlockSchedule> {
    build_schedule_with(portfolio, n, Lengths::Continuous)
}

pub fn build_schedule_with(portfolio: &Portfolio, n: usize, kind: Lengths) -> Result<BlockSchedule> {
    if n <= 3 {
        return Err(Error::domain(format!("sample size n = {n} must exceed 3")));
    }
    portfolio.validate()?;
    let target = cutoff_target(n);
    let get = |k: usize| {
        portfolio.block(k).map(|(l, t)| match kind {
            Lengths::Continuous => (l, t),
            Lengths::Integer => (l.round().max(1.0), t),
        })
    };
    let mut boundaries = vec![0.0];
    let mut lengths = Vec::new();
    let mut thresholds = Vec::new();
    let mut sum = 0.0;
    let mut k = 1;
    let next_block = loop {
        let Some((l, t)) = get(k) else {
            if lengths.is_empty() {
                return Err(Error::config("portfolio has no blocks"));
            }
            if sum < target {
                return Err(Error::config(format!(
                    "portfolio ends after {} blocks (total length {sum}) before the cutoff target {target}",
                    lengths.len()
                )));
            }
            break None;
        };
        if sum + l >= target && !lengths.is_empty() {
            break Some((l, t));
        }
        sum += l;
        lengths.push(l);
        thresholds.push(t);
        boundaries.push(sum);
        k += 1;
    };
    Ok(BlockSchedule {
        n,
        cutoff: lengths.len(),
        boundaries,
        lengths,
        thresholds,
        next_block,
        target,
        kind,
    })
}

impl BlockSchedule {
    pub fn len(&self) -> usize {
        self.cutoff
    }

    pub fn is_empty(&self) -> bool {
        self.cutoff == 0
    }

    /// `[b_k, b_{k+1})` for 0-based block index `i` (block `k = i + 1`).
    pub fn block(&self, i: usize) -> (f64, f64) {
        (self.boundaries[i], self.boundaries[i + 1])
    }

    /// Right edge `b_{K+1}` of the last estimated block.
    pub fn upper(&self) -> f64 {
        self.boundaries[self.cutoff]
    }

    /// Blocks whose threshold exceeds 1, outside the range where the
    /// sequence-model risk lemma applies.
    pub fn flagged(&self) -> Vec<usize> {
        (0..self.cutoff).filter(|&i| self.thresholds[i] > 1.0).collect()
    }

    /// 0-based block index containing frequency `u >= 0`, if `u < b_{K+1}`.
    pub fn locate(&self, u: f64) -> Option<usize> {
        if !(u >= 0.0) || u >= self.upper() {
            return None;
        }
        // First boundary strictly greater than u, minus one.
        Some(self.boundaries.partition_point(|&b| b <= u) - 1)
    }

    /// Coefficient indices (0-based, i.e. `j - 1`) of each block for
    /// integer-length schedules.
    pub fn index_ranges(&self) -> Vec<Range<usize>> {
        self.boundaries
            .windows(2)
            .map(|w| (w[0] as usize)..(w[1] as usize))
            .collect()
    }

    /// CSV with columns `k, b_lo, b_hi, L_k, t_k`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "b_lo", "b_hi", "L_k", "t_k"])?;
        for i in 0..self.cutoff {
            let (lo, hi) = self.block(i);
            w.write_record([
                (i + 1).to_string(),
                lo.to_string(),
                hi.to_string(),
                self.lengths[i].to_string(),
                self.thresholds[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
