//! Gaussian sequence model: Monte Carlo risk of each estimator against the oracle.

use blockshrink::schedule::Portfolio;
use blockshrink::seqmodel::{seq_risks, SeqEstimator, SeqExperiment};

fn main() -> blockshrink::Result<()> {
    let n = 2000;
    let theta: Vec<f64> = (1..=4000).map(|j| (j as f64).powf(-1.2)).collect();
    let exp = SeqExperiment::new(theta, n, &Portfolio::LogCubic, 5)?;
    println!("dimension {} over {} blocks", exp.dimension(), exp.schedule.cutoff);
    for est in [SeqEstimator::Ep, SeqEstimator::Stein, SeqEstimator::Oracle] {
        let r = seq_risks(&exp, &est, 400)?;
        println!(
            "{:<8} risk {:.4e} +- {:.1e}   oracle {:.4e}   ratio {:.3}",
            format!("{est:?}"),
            r.mc_risk,
            r.std_error,
            r.oracle_risk,
            r.mc_risk / r.oracle_risk
        );
    }
    Ok(())
}
