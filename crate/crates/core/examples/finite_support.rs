//! Cosine-series variant for data on [0, 1] (logit-normal sample).

use blockshrink::estimator::{cosine_estimate, EstimatorKind};
use blockshrink::schedule::{build_schedule_with, Lengths, Portfolio};
use blockshrink::{sample, DistributionSpec, Sample};

fn main() -> blockshrink::Result<()> {
    let n = 2000;
    let z = sample(&DistributionSpec::normal(0.0, 0.8), n, 21)?;
    let x = Sample::new(z.values().iter().map(|v| 1.0 / (1.0 + (-v).exp())).collect())?;
    let schedule = build_schedule_with(&Portfolio::LogCubic, n, Lengths::Integer)?;
    for kind in [EstimatorKind::Ep, EstimatorKind::Stein] {
        let est = cosine_estimate(&x, &schedule, kind)?;
        let row: Vec<String> = est.grid(9).iter().map(|(x, f)| format!("{x:.3}:{f:.3}")).collect();
        println!("{:<6} {}", kind.label(), row.join(" "));
    }
    Ok(())
}
