//! Closed-form risk bounds, exponential oracle-inequality factors and
//! minimax benchmarks.
//!
//! `c1`, `c2` and `C0` are universal constants whose values are not known;
//! every evaluator takes them explicitly and reports carry the values used.

mod report;

pub use report::{
    density_bound_report, density_d_dblprime, density_d_prime, moment_bound, moment_bound_from, seq_bound_report,
    seq_d_dblstar, seq_d_star, stein_gap_bound, Aggregates, BlockBound, BoundModel, BoundReport, FreeParameters,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::distributions::FunctionClass;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniversalConstants {
    /// Decoupling constant for degenerate U-statistics.
    pub c1: f64,
    /// Bernstein-type constant for U-statistics.
    pub c2: f64,
    /// Absolute constant of the sequence-model risk lemma.
    #[serde(rename = "C0", alias = "c0")]
    pub c0: f64,
}

impl Default for UniversalConstants {
    /// Placeholders: all three set to 1.
    fn default() -> Self {
        UniversalConstants {
            c1: 1.0,
            c2: 1.0,
            c0: 1.0,
        }
    }
}

impl UniversalConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("C0", self.c0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("constant {name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}

/// Which form of the first-term minimum in `λ1` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lambda1Form {
    /// The four-way minimum as stated in the block oracle inequality.
    #[default]
    Statement,
    /// The form reached inside the tail-probability derivation, with
    /// `q = 1 - (L+1)^{-1/2}` and `d1` replaced by its cap `(2Ld)^{1/2}`.
    Derivation,
}

fn check_positive(pairs: &[(&str, f64)]) -> Result<()> {
    for &(name, v) in pairs {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain(format!("{name} = {v} must be positive and finite")));
        }
    }
    Ok(())
}

fn check_lambda_args(l: f64, t: f64, d: f64, n: f64, consts: &UniversalConstants) -> Result<()> {
    check_positive(&[("L", l), ("t", t), ("d", d)])?;
    if !(n > 3.0 && n.is_finite()) {
        return Err(Error::domain(format!("n = {n} must exceed 3")));
    }
    consts.validate()
}

/// `(1 - min(1/2, t^{1/4}))^2 (1 - (L+1)^{-1/2})^2`.
fn shrink_factors(l: f64, t: f64) -> f64 {
    let g = 1.0 - 0.5f64.min(t.powf(0.25));
    let q = 1.0 - (l + 1.0).powf(-0.5);
    g * g * q * q
}

pub fn lambda1(
    l: f64,
    t: f64,
    d: f64,
    d_star: f64,
    n: f64,
    consts: &UniversalConstants,
    form: Lambda1Form,
) -> Result<f64> {
    check_lambda_args(l, t, d, n, consts)?;
    check_positive(&[("d*", d_star)])?;
    let c1 = consts.c1;
    let pre = shrink_factors(l, t) / (d * c1 * c1 * consts.c2);
    let terms = match form {
        Lambda1Form::Statement => [
            1.0 / (1.0 + 4.0 * t / n * (2.0 / d.sqrt() + 3.0 * t / (n * d))),
            c1 * d / (t * (8.0 * d_star + 3.0 * (l * t / n).sqrt())),
            d * (n * c1.powi(4) * t.powi(-4) * l.powf(-2.5)).cbrt() / ((2.0 * d).sqrt() + 20.0 * t / n).cbrt(),
            c1.powf(1.5) * d * n.sqrt() / (2.0 * t.powf(1.5) * l),
        ],
        Lambda1Form::Derivation => {
            let a = (l + 1.0).powf(-0.5);
            let d1 = (2.0 * l * d).sqrt();
            let s = l.sqrt() * a * t / n;
            [
                1.0 / (1.0 + 4.0 * s * (2.0 / d.sqrt() + 3.0 * s / d)),
                c1 * d / (t * (8.0 * d_star + 3.0 * l * (a * t / n).sqrt())),
                d * (c1.powi(4) * n * t.powi(-4) * l.powi(-2)).cbrt() / (d1 + 20.0 * a * l * t / n).cbrt(),
                c1.powf(1.5) * d * n.sqrt() / (2.0 * t.powf(1.5) * l),
            ]
        }
    };
    Ok(pre * terms.into_iter().fold(f64::INFINITY, f64::min))
}

pub fn lambda2(l: f64, t: f64, d: f64, n: f64, consts: &UniversalConstants) -> Result<f64> {
    check_lambda_args(l, t, d, n, consts)?;
    let c1 = consts.c1;
    let lead = n * 0.25f64.min(t.sqrt()) / (l * t * c1 * c1);
    let denom = 3.0 / c1 + 2.0 * d / (l * t) + 8.0 / n * (2.0 * d.sqrt() + t);
    Ok(lead * shrink_factors(l, t) / denom)
}

pub fn lambda3(l: f64, t: f64, d: f64, n: f64, consts: &UniversalConstants) -> Result<f64> {
    check_lambda_args(l, t, d, n, consts)?;
    let q = 1.0 - (l + 1.0).powf(-0.5);
    let lead = 0.25f64.min(t.sqrt()) / (6.0 * t * d.sqrt());
    Ok(lead * q * q / (1.0 + (t * l.powf(1.5) / (n * d)).sqrt()))
}

/// `(λ1, λ2, λ3)`.
pub fn lambdas(
    l: f64,
    t: f64,
    d: f64,
    d_star: f64,
    n: f64,
    consts: &UniversalConstants,
    form: Lambda1Form,
) -> Result<(f64, f64, f64)> {
    Ok((
        lambda1(l, t, d, d_star, n, consts, form)?,
        lambda2(l, t, d, n, consts)?,
        lambda3(l, t, d, n, consts)?,
    ))
}

/// `G = [c1 c2 e^{-t²Lλ1} + 2 c1 e^{-t²Lλ2} + e^{-t²Lλ3}]^{1/2}`, assembled
/// in log space.
pub fn g_from_lambdas(l: f64, t: f64, lam: (f64, f64, f64), consts: &UniversalConstants) -> f64 {
    let s = t * t * l;
    let logs = [
        (consts.c1 * consts.c2).ln() - s * lam.0,
        (2.0 * consts.c1).ln() - s * lam.1,
        -s * lam.2,
    ];
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + logs.iter().map(|&v| (v - m).exp()).sum::<f64>().ln();
    (0.5 * lse).exp()
}

pub fn g_factor(
    l: f64,
    t: f64,
    d: f64,
    d_star: f64,
    n: f64,
    consts: &UniversalConstants,
    form: Lambda1Form,
) -> Result<f64> {
    let lam = lambdas(l, t, d, d_star, n, consts, form)?;
    Ok(g_from_lambdas(l, t, lam, consts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StirlingFactors {
    /// `Γ(L/2) / [(2π)^{1/2} e^{-L/2} (L/2)^{L/2 - 1/2}]`.
    pub ratio: f64,
    /// Lower constant; the ratio itself is the tightest admissible choice.
    pub s_star: f64,
    /// Upper constant; likewise the ratio.
    pub s_dblstar: f64,
}

/// Stirling ratio for `Γ(L/2)`; `L` need not be an integer.
pub fn stirling_factors(l: f64) -> Result<StirlingFactors> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::domain(format!("Stirling factors need L > 0, got {l}")));
    }
    let x = 0.5 * l;
    let ln_ratio = ln_gamma(x) - 0.5 * (2.0 * PI).ln() + x - (x - 0.5) * x.ln();
    let ratio = ln_ratio.exp();
    debug_assert!(ratio > 1.0, "Stirling ratio {ratio} at L = {l}");
    Ok(StirlingFactors {
        ratio,
        s_star: ratio,
        s_dblstar: ratio,
    })
}

/// Lower bound on the EP risk in a block with `θ = 0`:
/// `t / (s**_L (1+t)) · n^{-1} L^{1/2} exp{-L[t - ln(1+t)]/2}`.
pub fn seq_lower_bound(l: f64, t: f64, n: f64) -> Result<f64> {
    check_positive(&[("L", l), ("t", t), ("n", n)])?;
    let s = stirling_factors(l)?.s_dblstar;
    Ok(t / (s * (1.0 + t)) / n * l.sqrt() * (-l * (t - t.ln_1p()) / 2.0).exp())
}

/// `P(α, Q) = (2α+1) [π(2α+1)(α+1)/α]^{-2α/(2α+1)} Q^{1/(2α+1)}`.
pub fn pinsker_constant(alpha: f64, q: f64) -> Result<f64> {
    check_positive(&[("alpha", alpha), ("Q", q)])?;
    let a = 2.0 * alpha + 1.0;
    Ok(a * (PI * a * (alpha + 1.0) / alpha).powf(-2.0 * alpha / a) * q.powf(1.0 / a))
}

/// Whether a benchmark refers to the density or to the cf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    #[default]
    Density,
    /// Plancherel scales every cf risk by `2π`.
    Cf,
}

/// Sharp minimax MISE of the class at sample size `n`.
pub fn minimax_benchmark(class: &FunctionClass, n: f64, target: Target) -> Result<f64> {
    class.validate()?;
    if !(n > 3.0 && n.is_finite()) {
        return Err(Error::domain(format!("n = {n} must exceed 3")));
    }
    let density = match *class {
        FunctionClass::Sobolev { alpha, q } => pinsker_constant(alpha, q)? * n.powf(-2.0 * alpha / (2.0 * alpha + 1.0)),
        FunctionClass::Analytic { r, gamma, .. } => (n.ln() / (2.0 * gamma)).powf(1.0 / r) / (PI * n),
        FunctionClass::BoundedSpectrum { s } => s / (PI * n),
    };
    Ok(match target {
        Target::Density => density,
        Target::Cf => 2.0 * PI * density,
    })
}
