//! Block-by-block oracle inequality for the density estimator.

use blockshrink::bounds::{density_bound_report, FreeParameters, UniversalConstants};
use blockshrink::schedule::{build_schedule, Portfolio};
use blockshrink::DistributionSpec;

fn main() -> blockshrink::Result<()> {
    let spec = DistributionSpec::cauchy(0.0, 1.0);
    let schedule = build_schedule(&Portfolio::LogCubic, 10_000)?;
    let report = density_bound_report(&spec, &schedule, &FreeParameters::default(), &UniversalConstants::default())?;
    println!("{:>3} {:>7} {:>6} {:>10} {:>10} {:>10} {:>10}", "k", "L", "t", "oracle", "D'", "D''", "rhs");
    for b in &report.blocks {
        println!(
            "{:>3} {:>7.2} {:>6.3} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e}",
            b.k, b.length, b.threshold, b.oracle_risk, b.d_prime, b.d_dblprime, b.rhs
        );
    }
    let a = &report.aggregate;
    println!("oracle total {:.4e}, sum form {:.4e}, split form {:.4e} (m = {})", a.oracle_total, a.rhs_total, a.rhs_split, a.best_m);
    Ok(())
}
