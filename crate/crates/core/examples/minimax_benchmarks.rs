//! Sharp minimax constants for Sobolev, analytic and bounded-spectrum classes.

use blockshrink::bounds::{minimax_benchmark, Target};
use blockshrink::distributions::FunctionClass;

fn main() -> blockshrink::Result<()> {
    let classes = [
        FunctionClass::Sobolev { alpha: 1.0, q: 1.0 },
        FunctionClass::Sobolev { alpha: 2.0, q: 1.0 },
        FunctionClass::Analytic { r: 1.0, gamma: 1.0, q: 1.0 },
        FunctionClass::BoundedSpectrum { s: 1.0 },
    ];
    println!("{:<50} {:>12} {:>12} {:>12}", "class", "n=1e2", "n=1e4", "n=1e6");
    for c in &classes {
        let r: Vec<f64> = [1e2, 1e4, 1e6]
            .iter()
            .map(|&n| minimax_benchmark(c, n, Target::Density))
            .collect::<Result<_, _>>()?;
        println!("{:<50} {:>12.4e} {:>12.4e} {:>12.4e}", format!("{c:?}"), r[0], r[1], r[2]);
    }
    Ok(())
}
