//! Density estimate from one sample with the EP and Stein weights.

use blockshrink::estimator::{assemble_cf, density_grid, ep_weights, nonneg_project, stein_weights, Grid};
use blockshrink::schedule::{build_schedule, Portfolio};
use blockshrink::spectral::{BlockStats, EnergyMethod};
use blockshrink::{pdf_true, sample, DistributionSpec};

fn main() -> blockshrink::Result<()> {
    let spec = DistributionSpec::NormalMixture {
        weights: vec![0.5, 0.5],
        means: vec![-1.5, 1.5],
        sds: vec![0.6, 0.6],
    };
    let n = 1000;
    let x = sample(&spec, n, 11)?;
    let schedule = build_schedule(&Portfolio::LogCubic, n)?;
    let stats = BlockStats::compute(&x, &schedule, EnergyMethod::Auto)?;
    let ep = ep_weights(&stats, &schedule);
    let stein = stein_weights(&stats, &schedule);
    println!("K = {}, b_(K+1) = {:.2}", schedule.cutoff, schedule.upper());
    println!("EP weights    {:?}", ep.weights.iter().map(|w| format!("{w:.2}")).collect::<Vec<_>>());
    println!("Stein weights {:?}", stein.weights.iter().map(|w| format!("{w:.2}")).collect::<Vec<_>>());

    let grid = Grid::new(-4.0, 4.0, 17)?;
    let raw = density_grid(&assemble_cf(&ep, &x), &grid);
    let proj = nonneg_project(&raw)?;
    println!("{:>6} {:>9} {:>9} {:>9}", "x", "truth", "ep", "ep+");
    for ((x, f), (_, g)) in raw.iter().zip(&proj) {
        println!("{x:>6.2} {:>9.4} {f:>9.4} {g:>9.4}", pdf_true(&spec, *x));
    }
    Ok(())
}
