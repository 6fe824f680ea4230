//! Reproducible Monte Carlo MISE, split runs pooled, and a rate sweep.

use blockshrink::harness::{rate_sweep, run_experiment, ExperimentConfig, ExperimentResult};
use blockshrink::DistributionSpec;

fn main() -> blockshrink::Result<()> {
    let mut cfg = ExperimentConfig::new(DistributionSpec::standard_normal(), 500);
    cfg.replications = 40;
    cfg.seed = 17;
    let whole = run_experiment(&cfg)?;

    let mut halves = Vec::new();
    for first in [0, 20] {
        let mut c = cfg.clone();
        c.replications = 20;
        c.first_replication = first;
        halves.push(run_experiment(&c)?);
    }
    let pooled = ExperimentResult::pool(&halves)?;
    for (a, b) in whole.estimators.iter().zip(&pooled.estimators) {
        println!("{:<7} MISE {:.5e} +- {:.1e} (pooled {:.5e})", a.kind.label(), a.mise, a.std_error, b.mise);
    }
    println!("oracle MISE {:.5e}, tail bias {:.2e}, hash {}", whole.oracle_mise, whole.tail_bias, whole.metadata.config_hash);

    cfg.replications = 20;
    for r in rate_sweep(&cfg, &[100, 400, 1600])? {
        let ep = &r.estimators[0];
        println!("n = {:>5}: {} MISE {:.4e}", r.metadata.n, ep.kind.label(), ep.mise);
    }
    Ok(())
}
