//! Test laws: closed-form cf and density, sampling, and the spectral functionals.

use blockshrink::distributions::{energy_d, sobolev_index};
use blockshrink::{cf_true, pdf_true, sample, DistributionSpec};

fn main() -> blockshrink::Result<()> {
    let specs = [
        DistributionSpec::standard_normal(),
        DistributionSpec::cauchy(0.0, 1.0),
        DistributionSpec::Linnik { beta: 0.75 },
        DistributionSpec::PearsonType { rho: 0.4 },
        DistributionSpec::TriangularCf { s: 1.0 },
        DistributionSpec::Uniform { a: 0.0, b: 1.0 },
    ];
    println!("{:<28} {:>10} {:>10} {:>10} {:>10} {:>8}", "law", "h(1)", "f(0.5)", "d", "median", "sobolev");
    for spec in &specs {
        let s = sample(spec, 5000, 7)?;
        println!(
            "{:<28} {:>10.5} {:>10.5} {:>10.5} {:>10.4} {:>8.3}",
            spec.label(),
            cf_true(spec, 1.0).re,
            pdf_true(spec, 0.5),
            energy_d(spec),
            s.quantile(0.5),
            sobolev_index(spec),
        );
    }
    Ok(())
}
