//! Test distributions with closed-form characteristic functions.

mod functionals;

pub use functionals::{
    block_pair_functionals, class_functional, d_star, energy_d, sobolev_index, tail_energy,
    true_block_energies, true_block_energy, ClassFunctionals, FunctionClass, FunctionalValue,
    LevelSetProfile,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quad::{adaptive_breaks, Tolerance};
use crate::sample::Sample;
use crate::special::bessel_k;

/// A test distribution. Serialized as `{"family": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    NormalMixture {
        weights: Vec<f64>,
        means: Vec<f64>,
        sds: Vec<f64>,
    },
    CauchyMixture {
        weights: Vec<f64>,
        locations: Vec<f64>,
        scales: Vec<f64>,
    },
    /// cf `1 / (1 + |u|^beta)`, `beta` in (1/2, 1].
    Linnik { beta: f64 },
    /// cf `(1 + u^2)^{-rho}`, `rho` in (1/4, 1/2].
    PearsonType { rho: f64 },
    /// cf `(1 - |u|/s)_+`.
    TriangularCf { s: f64 },
    Uniform { a: f64, b: f64 },
}

impl DistributionSpec {
    pub fn standard_normal() -> Self {
        Self::normal(0.0, 1.0)
    }

    pub fn normal(mean: f64, sd: f64) -> Self {
        DistributionSpec::NormalMixture {
            weights: vec![1.0],
            means: vec![mean],
            sds: vec![sd],
        }
    }

    pub fn cauchy(location: f64, scale: f64) -> Self {
        DistributionSpec::CauchyMixture {
            weights: vec![1.0],
            locations: vec![location],
            scales: vec![scale],
        }
    }

    /// Short human-readable label, e.g. `linnik(0.75)`.
    pub fn label(&self) -> String {
        match self {
            DistributionSpec::NormalMixture { weights, means, sds } => {
                if weights.len() == 1 {
                    format!("normal({}, {})", means[0], sds[0])
                } else {
                    format!("normal_mixture[{}]", weights.len())
                }
            }
            DistributionSpec::CauchyMixture {
                weights,
                locations,
                scales,
            } => {
                if weights.len() == 1 {
                    format!("cauchy({}, {})", locations[0], scales[0])
                } else {
                    format!("cauchy_mixture[{}]", weights.len())
                }
            }
            DistributionSpec::Linnik { beta } => format!("linnik({beta})"),
            DistributionSpec::PearsonType { rho } => format!("pearson({rho})"),
            DistributionSpec::TriangularCf { s } => format!("triangular_cf({s})"),
            DistributionSpec::Uniform { a, b } => format!("uniform({a}, {b})"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn mixture(kind: &str, w: &[f64], loc: &[f64], scale: &[f64]) -> Result<()> {
            if w.is_empty() || w.len() != loc.len() || w.len() != scale.len() {
                return Err(Error::domain(format!(
                    "{kind}: weights, locations and scales must be nonempty and of equal length"
                )));
            }
            if w.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::domain(format!("{kind}: weights must be positive")));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::domain(format!("{kind}: weights sum to {total}, not 1")));
            }
            if loc.iter().any(|x| !x.is_finite()) {
                return Err(Error::domain(format!("{kind}: locations must be finite")));
            }
            if scale.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::domain(format!("{kind}: scales must be positive")));
            }
            Ok(())
        }
        match self {
            DistributionSpec::NormalMixture { weights, means, sds } => {
                mixture("normal_mixture", weights, means, sds)
            }
            DistributionSpec::CauchyMixture {
                weights,
                locations,
                scales,
            } => mixture("cauchy_mixture", weights, locations, scales),
            DistributionSpec::Linnik { beta } => {
                if *beta > 0.5 && *beta <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::domain(format!("linnik beta {beta} outside (1/2, 1]")))
                }
            }
            DistributionSpec::PearsonType { rho } => {
                if *rho > 0.25 && *rho <= 0.5 {
                    Ok(())
                } else {
                    Err(Error::domain(format!("pearson rho {rho} outside (1/4, 1/2]")))
                }
            }
            DistributionSpec::TriangularCf { s } => {
                if *s > 0.0 && s.is_finite() {
                    Ok(())
                } else {
                    Err(Error::domain(format!("triangular_cf s = {s} must be positive")))
                }
            }
            DistributionSpec::Uniform { a, b } => {
                if a.is_finite() && b.is_finite() && a < b {
                    Ok(())
                } else {
                    Err(Error::domain(format!("uniform needs finite a < b, got [{a}, {b}]")))
                }
            }
        }
    }

    /// Points in the frequency domain where the cf is not smooth (u >= 0).
    pub fn cf_kinks(&self) -> Vec<f64> {
        match self {
            DistributionSpec::TriangularCf { s } => vec![0.0, *s],
            _ => vec![0.0],
        }
    }

    /// Points where the density is singular, kinked, or concentrated.
    pub fn pdf_breaks(&self) -> Vec<f64> {
        match self {
            DistributionSpec::NormalMixture { means, .. } => means.clone(),
            DistributionSpec::CauchyMixture { locations, .. } => locations.clone(),
            DistributionSpec::Uniform { a, b } => vec![*a, *b],
            _ => vec![0.0],
        }
    }

    /// Whether `|h|` vanishes outside a bounded set; returns its edge.
    pub fn spectrum_edge(&self) -> Option<f64> {
        match self {
            DistributionSpec::TriangularCf { s } => Some(*s),
            _ => None,
        }
    }

    /// Supremum of the density (`inf` when unbounded).
    pub fn sup_pdf(&self) -> f64 {
        match self {
            DistributionSpec::Linnik { .. } | DistributionSpec::PearsonType { .. } => f64::INFINITY,
            DistributionSpec::TriangularCf { s } => s / (2.0 * PI),
            DistributionSpec::Uniform { a, b } => 1.0 / (b - a),
            DistributionSpec::NormalMixture { means, .. }
            | DistributionSpec::CauchyMixture {
                locations: means, ..
            } => {
                // Modes lie near component centres; refine the best centre.
                let mut best = (f64::NEG_INFINITY, 0.0);
                for &m in means {
                    let v = self.pdf(m);
                    if v > best.0 {
                        best = (v, m);
                    }
                }
                let spread = means.iter().fold(0.0f64, |acc, &m| acc.max((m - best.1).abs())) + 1.0;
                let grid = 2001;
                let (lo, hi) = (best.1 - spread, best.1 + spread);
                let step = (hi - lo) / (grid - 1) as f64;
                let mut arg = best.1;
                for i in 0..grid {
                    let x = lo + step * i as f64;
                    let v = self.pdf(x);
                    if v > best.0 {
                        best = (v, x);
                        arg = x;
                    }
                }
                let refined = golden_max(|x| self.pdf(x), arg - step, arg + step, 1e-12);
                best.0.max(self.pdf(refined))
            }
        }
    }
}

/// Golden-section search for a maximizer on `[lo, hi]`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (hi - lo) > tol * (1.0 + lo.abs().max(hi.abs())) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// The characteristic function `h(u)`. `h(0) = 1` and `h(-u) = conj(h(u))`
/// hold exactly.
pub fn cf_true(spec: &DistributionSpec, u: f64) -> Complex64 {
    let v = cf_nonneg(spec, u.abs());
    if u < 0.0 {
        v.conj()
    } else {
        v
    }
}

fn cf_nonneg(spec: &DistributionSpec, u: f64) -> Complex64 {
    match spec {
        DistributionSpec::NormalMixture { weights, means, sds } => {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((w, m), s) in weights.iter().zip(means).zip(sds) {
                let amp = w * (-0.5 * s * s * u * u).exp();
                acc += Complex64::from_polar(amp, m * u);
            }
            acc / weights.iter().sum::<f64>()
        }
        DistributionSpec::CauchyMixture {
            weights,
            locations,
            scales,
        } => {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((w, l), c) in weights.iter().zip(locations).zip(scales) {
                acc += Complex64::from_polar(w * (-c * u).exp(), l * u);
            }
            acc / weights.iter().sum::<f64>()
        }
        DistributionSpec::Linnik { beta } => Complex64::new(1.0 / (1.0 + u.powf(*beta)), 0.0),
        DistributionSpec::PearsonType { rho } => Complex64::new((1.0 + u * u).powf(-rho), 0.0),
        DistributionSpec::TriangularCf { s } => Complex64::new((1.0 - u / s).max(0.0), 0.0),
        DistributionSpec::Uniform { a, b } => {
            if u == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let half = 0.5 * u * (b - a);
            Complex64::from_polar(half.sin() / half, 0.5 * u * (a + b))
        }
    }
}

/// `|h(u)|^2`, evaluated without forming the complex value where possible.
pub fn cf_abs2(spec: &DistributionSpec, u: f64) -> f64 {
    cf_true(spec, u).norm_sqr()
}

/// The density `f(x)`; `inf` at the singular point of Linnik and Pearson laws.
pub fn pdf_true(spec: &DistributionSpec, x: f64) -> f64 {
    match spec {
        DistributionSpec::NormalMixture { weights, means, sds } => {
            let norm = (2.0 * PI).sqrt();
            let total: f64 = weights.iter().sum();
            weights
                .iter()
                .zip(means)
                .zip(sds)
                .map(|((w, m), s)| {
                    let z = (x - m) / s;
                    w * (-0.5 * z * z).exp() / (norm * s)
                })
                .sum::<f64>()
                / total
        }
        DistributionSpec::CauchyMixture {
            weights,
            locations,
            scales,
        } => {
            let total: f64 = weights.iter().sum();
            weights
                .iter()
                .zip(locations)
                .zip(scales)
                .map(|((w, l), c)| w * c / (PI * (c * c + (x - l) * (x - l))))
                .sum::<f64>()
                / total
        }
        DistributionSpec::Linnik { beta } => linnik_pdf(*beta, x),
        DistributionSpec::PearsonType { rho } => {
            let ax = x.abs();
            if ax == 0.0 {
                return f64::INFINITY;
            }
            let nu = rho - 0.5;
            let log_norm = 0.5 * PI.ln() + ln_gamma(*rho) + nu * 2f64.ln();
            let k = bessel_k(nu, ax);
            if k == 0.0 {
                return 0.0;
            }
            (nu * ax.ln() + k.ln() - log_norm).exp()
        }
        DistributionSpec::TriangularCf { s } => {
            let y = s * x;
            if y == 0.0 {
                return s / (2.0 * PI);
            }
            let half = (0.5 * y).sin();
            2.0 * half * half / (PI * s * x * x)
        }
        DistributionSpec::Uniform { a, b } => {
            if x >= *a && x <= *b {
                1.0 / (b - a)
            } else {
                0.0
            }
        }
    }
}

/// Linnik density from its Laplace-type mixture representation
/// `f(x) = sin(pi b/2)/pi \int_0^inf v^b e^{-v|x|} / (1 + v^{2b} + 2 v^b cos(pi b/2)) dv`.
fn linnik_pdf(beta: f64, x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        return f64::INFINITY;
    }
    let (sin_b, cos_b) = (0.5 * PI * beta).sin_cos();
    // Substitute v = e^s / |x|.
    let g = |s: f64| {
        let y = s.exp();
        let vb = (y / ax).powf(beta);
        vb * (-y).exp() * y / (1.0 + vb * vb + 2.0 * vb * cos_b)
    };
    let pivot = ax.ln().clamp(-40.0, 3.0);
    let mut breaks = vec![-46.0, pivot - 2.0, pivot, pivot + 2.0, 4.5];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let breaks: Vec<f64> = breaks.into_iter().filter(|b| (-46.0..=4.5).contains(b)).collect();
    let tol = Tolerance {
        rel: 1e-11,
        abs: 0.0,
    };
    sin_b / (PI * ax) * adaptive_breaks(g, &breaks, tol)
}

impl DistributionSpec {
    pub fn cf(&self, u: f64) -> Complex64 {
        cf_true(self, u)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        pdf_true(self, x)
    }
}

/// Draws `n` observations from `spec`; deterministic given `(spec, n, seed)`.
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(spec, n, &mut rng)
}

/// Draws `n` observations using the caller's generator.
pub fn sample_with<R: Rng + ?Sized>(spec: &DistributionSpec, n: usize, rng: &mut R) -> Result<Sample> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let values = match spec {
        DistributionSpec::NormalMixture { weights, means, sds } => (0..n)
            .map(|_| {
                let j = pick_component(weights, rng);
                let z: f64 = StandardNormal.sample(rng);
                means[j] + sds[j] * z
            })
            .collect(),
        DistributionSpec::CauchyMixture {
            weights,
            locations,
            scales,
        } => (0..n)
            .map(|_| {
                let j = pick_component(weights, rng);
                let u: f64 = rng.random();
                locations[j] + scales[j] * (PI * (u - 0.5)).tan()
            })
            .collect(),
        DistributionSpec::Linnik { beta } => (0..n).map(|_| linnik_draw(*beta, rng)).collect(),
        DistributionSpec::PearsonType { rho } => {
            let g = Gamma::new(*rho, 1.0).map_err(|e| Error::domain(e.to_string()))?;
            (0..n).map(|_| g.sample(rng) - g.sample(rng)).collect()
        }
        DistributionSpec::TriangularCf { s } => triangular_draws(*s, n, rng),
        DistributionSpec::Uniform { a, b } => {
            (0..n).map(|_| a + (b - a) * rng.random::<f64>()).collect()
        }
    };
    Sample::new(values)
}

fn pick_component<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    if weights.len() == 1 {
        return 0;
    }
    let total: f64 = weights.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (j, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return j;
        }
    }
    weights.len() - 1
}

/// `W^{1/beta} S` with `W ~ Exp(1)` and `S` standard symmetric
/// `beta`-stable (Chambers–Mallows–Stuck).
fn linnik_draw<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let v = PI * (rng.random::<f64>() - 0.5);
    let e: f64 = Exp1.sample(rng);
    let stable = if beta == 1.0 {
        v.tan()
    } else {
        (beta * v).sin() / v.cos().powf(1.0 / beta)
            * (((1.0 - beta) * v).cos() / e).powf((1.0 - beta) / beta)
    };
    let w: f64 = Exp1.sample(rng);
    w.powf(1.0 / beta) * stable
}

/// Envelope constant for the triangular-cf sampler: with a Cauchy proposal
/// of scale `2/s`, `f(x) <= min(s/(2 pi), 2/(pi s x^2)) <= 2 g(x)`.
pub const TRIANGULAR_ENVELOPE: f64 = 2.0;

fn triangular_draws<R: Rng + ?Sized>(s: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let gamma = 2.0 / s;
    let mut out = Vec::with_capacity(n);
    let mut proposed = 0u64;
    while out.len() < n {
        proposed += 1;
        let x = gamma * (PI * (rng.random::<f64>() - 0.5)).tan();
        let g = 1.0 / (PI * gamma * (1.0 + (x / gamma).powi(2)));
        let f = pdf_true(&DistributionSpec::TriangularCf { s }, x);
        if rng.random::<f64>() * TRIANGULAR_ENVELOPE * g <= f {
            out.push(x);
        }
    }
    log::debug!(
        "triangular_cf({s}) rejection sampler: acceptance {:.4} over {proposed} proposals",
        n as f64 / proposed as f64
    );
    out
}

/// `(2/beta) Gamma(1/beta) Gamma(2 - 1/beta)`, the Linnik energy.
pub(crate) fn linnik_energy(beta: f64) -> f64 {
    2.0 / beta * gamma(1.0 / beta) * gamma(2.0 - 1.0 / beta)
}
