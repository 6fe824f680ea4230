//! Empirical cf against the truth, and block energies by both routes.

use blockshrink::schedule::{build_schedule, Portfolio};
use blockshrink::spectral::{block_energy_exact, block_energy_quad, ecf_eval, theta_hat, DEFAULT_QUAD_NODES};
use blockshrink::distributions::true_block_energy;
use blockshrink::{cf_true, sample, DistributionSpec};

fn main() -> blockshrink::Result<()> {
    let spec = DistributionSpec::Linnik { beta: 0.75 };
    let n = 800;
    let x = sample(&spec, n, 3)?;
    for u in [0.25, 1.0, 4.0, 16.0] {
        let e = ecf_eval(&x, u);
        println!("u = {u:>5}: ecf = {:+.4}{:+.4}i, h = {:+.4}", e.re, e.im, cf_true(&spec, u).re);
    }
    let schedule = build_schedule(&Portfolio::LogCubic, n)?;
    println!("{:>3} {:>8} {:>8} {:>12} {:>12} {:>10} {:>10}", "k", "lo", "hi", "exact", "quadrature", "theta_hat", "theta");
    for k in 0..schedule.cutoff.min(8) {
        let (a, b) = schedule.block(k);
        let exact = block_energy_exact(&x, a, b)?;
        let quad = block_energy_quad(&x, a, b, DEFAULT_QUAD_NODES)?;
        let l = b - a;
        println!(
            "{:>3} {a:>8.3} {b:>8.3} {exact:>12.6e} {quad:>12.6e} {:>10.2e} {:>10.2e}",
            k + 1,
            theta_hat(exact, l, n),
            true_block_energy(&spec, a, b) / l,
        );
    }
    Ok(())
}
