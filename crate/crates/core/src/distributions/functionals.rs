use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::gamma::gamma;

use super::{cf_abs2, golden_max, linnik_energy, pdf_true, DistributionSpec};
use crate::error::{Error, Result};
use crate::quad::{adaptive, adaptive_breaks, real_line_nodes, Tolerance};
use crate::special::sine_integral;

const ENERGY_TOL: Tolerance = Tolerance {
    rel: 1e-11,
    abs: 1e-300,
};

/// Smoothness classes of densities, described through their cf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionClass {
    /// `pi^{-1} \int_0^inf (1 + u^{2 alpha}) |h|^2 du <= q`.
    Sobolev {
        alpha: f64,
        #[serde(default = "unit")]
        q: f64,
    },
    /// `pi^{-1} \int_0^inf |e^{gamma u^r} h(u)|^2 du <= q`.
    Analytic {
        r: f64,
        gamma: f64,
        #[serde(default = "unit")]
        q: f64,
    },
    /// `h` vanishes outside `[-s, s]`.
    BoundedSpectrum { s: f64 },
}

fn unit() -> f64 {
    1.0
}

impl FunctionClass {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            FunctionClass::Sobolev { alpha, q } => alpha > 0.0 && q > 0.0 && alpha.is_finite(),
            FunctionClass::Analytic { r, gamma, q } => {
                r > 0.0 && r <= 2.0 && gamma > 0.0 && gamma.is_finite() && q > 0.0
            }
            FunctionClass::BoundedSpectrum { s } => s > 0.0 && s.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid class parameters {self:?}")))
        }
    }
}

/// A weighted cf energy that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalValue {
    Finite(f64),
    Divergent,
}

impl FunctionalValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, FunctionalValue::Finite(_))
    }

    /// The value, with `inf` standing for divergence.
    pub fn value(&self) -> f64 {
        match *self {
            FunctionalValue::Finite(v) => v,
            FunctionalValue::Divergent => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFunctionals {
    pub class: FunctionClass,
    /// `\int |h|^2 du` over the whole line.
    pub d: f64,
    /// Sobolev or analytic functional; `None` for the bounded-spectrum class.
    pub value: Option<FunctionalValue>,
    /// Whether the distribution lies in the class (`value <= q`, or support
    /// of `h` inside `[-s, s]`).
    pub member: bool,
    pub tail_from: f64,
    /// `pi^{-1} \int_{tail_from}^inf |h|^2 du`.
    pub tail_energy: f64,
}

/// `\int |h(u)|^2 du` over the real line, in closed form.
pub fn energy_d(spec: &DistributionSpec) -> f64 {
    match spec {
        DistributionSpec::NormalMixture { weights, means, sds } => {
            let total: f64 = weights.iter().sum();
            let mut acc = 0.0;
            for j in 0..weights.len() {
                for k in 0..weights.len() {
                    let var = sds[j] * sds[j] + sds[k] * sds[k];
                    let dm = means[j] - means[k];
                    acc += weights[j] * weights[k] * (2.0 * PI / var).sqrt() * (-dm * dm / (2.0 * var)).exp();
                }
            }
            acc / (total * total)
        }
        DistributionSpec::CauchyMixture {
            weights,
            locations,
            scales,
        } => {
            let total: f64 = weights.iter().sum();
            let mut acc = 0.0;
            for j in 0..weights.len() {
                for k in 0..weights.len() {
                    let c = scales[j] + scales[k];
                    let dl = locations[j] - locations[k];
                    acc += weights[j] * weights[k] * 2.0 * c / (c * c + dl * dl);
                }
            }
            acc / (total * total)
        }
        DistributionSpec::Linnik { beta } => linnik_energy(*beta),
        _ => 2.0 * tail_energy(spec, 0.0),
    }
}

/// `\int_a^b |h(u)|^2 du` for `0 <= a <= b`.
pub fn true_block_energy(spec: &DistributionSpec, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if let Some(edge) = spec.spectrum_edge() {
        if a >= edge {
            return 0.0;
        }
    }
    let mut breaks = vec![a];
    breaks.extend(spec.cf_kinks().into_iter().filter(|&k| k > a && k < b));
    breaks.push(b);
    adaptive_breaks(|u| cf_abs2(spec, u), &breaks, ENERGY_TOL)
}

/// True block energies for consecutive blocks `[bounds[k], bounds[k+1])`.
pub fn true_block_energies(spec: &DistributionSpec, bounds: &[f64]) -> Vec<f64> {
    bounds
        .windows(2)
        .map(|w| true_block_energy(spec, w[0], w[1]))
        .collect()
}

/// `\int_a^inf |h(u)|^2 du` for `a >= 0` (no `pi^{-1}` factor).
pub fn tail_energy(spec: &DistributionSpec, a: f64) -> f64 {
    let a = a.max(0.0);
    match spec {
        DistributionSpec::NormalMixture { sds, .. } => {
            let s = sds.iter().copied().fold(f64::INFINITY, f64::min);
            // |h|^2 <= exp(-s^2 u^2): past a + delta it is below e^{-80} of its value at a.
            let delta = if a > 0.0 {
                (9.0 / s).min(40.0 / (s * s * a))
            } else {
                9.0 / s
            };
            true_block_energy(spec, a, a + delta)
        }
        DistributionSpec::CauchyMixture { scales, .. } => {
            let c = scales.iter().copied().fold(f64::INFINITY, f64::min);
            true_block_energy(spec, a, a + 40.0 / c)
        }
        DistributionSpec::Linnik { beta } => {
            // u^beta / (1 + u^beta) ~ Beta(1/beta, 2 - 1/beta).
            let p = 1.0 / beta;
            let q = 2.0 - 1.0 / beta;
            let x = 1.0 / (1.0 + a.powf(*beta));
            (ln_beta(p, q)).exp() / beta * beta_reg(q, p, x)
        }
        DistributionSpec::PearsonType { rho } => {
            let p = 2.0 * rho - 0.5;
            let x = 1.0 / (1.0 + a * a);
            0.5 * ln_beta(0.5, p).exp() * beta_reg(p, 0.5, x)
        }
        DistributionSpec::TriangularCf { s } => {
            if a >= *s {
                0.0
            } else {
                (s - a).powi(3) / (3.0 * s * s)
            }
        }
        DistributionSpec::Uniform { a: lo, b: hi } => {
            let width = hi - lo;
            let x = 0.5 * a * width;
            let head = if x == 0.0 { 0.0 } else { x.sin().powi(2) / x };
            2.0 / width * (head + PI / 2.0 - sine_integral(2.0 * x))
        }
    }
}

/// Level-set integrals `I(z) = \int_{f >= z} f^2` on a fixed node set,
/// reusable across many values of `L`.
#[derive(Debug, Clone)]
pub struct LevelSetProfile {
    /// Density values at the nodes, descending.
    levels: Vec<f64>,
    /// `cumulative[i] = \sum_{j <= i} w_j f_j^2`.
    cumulative: Vec<f64>,
    sup: f64,
    d: f64,
}

impl LevelSetProfile {
    pub fn new(spec: &DistributionSpec) -> Self {
        let nodes = real_line_nodes(&spec.pdf_breaks(), 0.125);
        let mut pts: Vec<(f64, f64)> = nodes
            .iter()
            .map(|&(x, w)| {
                let f = pdf_true(spec, x);
                (f, w * f * f)
            })
            .filter(|&(f, _)| f > 0.0)
            .collect();
        pts.sort_by(|p, q| q.0.total_cmp(&p.0));
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(pts.len());
        for &(_, m) in &pts {
            acc += m;
            cumulative.push(acc);
        }
        LevelSetProfile {
            levels: pts.iter().map(|p| p.0).collect(),
            cumulative,
            sup: spec.sup_pdf(),
            d: energy_d(spec),
        }
    }

    /// `\int f^2` from the node set (should equal `d / (2 pi)`).
    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// `\int_{f >= z} f^2`.
    pub fn level_integral(&self, z: f64) -> f64 {
        let count = self.levels.partition_point(|&f| f >= z);
        if count == 0 {
            0.0
        } else {
            self.cumulative[count - 1]
        }
    }

    /// `min_{z > 0} (z + L z^{-1} \int_{f >= z} f^2)`.
    pub fn d_star(&self, l: f64) -> Result<f64> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::domain(format!("d_star needs L > 0, got {l}")));
        }
        let phi = |z: f64| z + l / z * self.level_integral(z);
        let cap = (2.0 * (self.d * l).sqrt()).min(self.sup);
        let lo = 1e-6f64;
        let hi = cap.max(lo * 1.0001);
        let grid = 200;
        let ratio = (hi / lo).ln() / (grid - 1) as f64;
        let zs: Vec<f64> = (0..grid).map(|i| lo * (ratio * i as f64).exp()).collect();
        let (mut best_i, mut best) = (0, f64::INFINITY);
        for (i, &z) in zs.iter().enumerate() {
            let v = phi(z);
            if v < best {
                best = v;
                best_i = i;
            }
        }
        let a = zs[best_i.saturating_sub(1)];
        let b = zs[(best_i + 1).min(grid - 1)];
        let z = golden_max(|z| -phi(z), a, b, 1e-10);
        best = best.min(phi(z));
        // Just above sup f the level set is null, so the infimum is at most sup f.
        if self.sup.is_finite() {
            best = best.min(self.sup);
        }
        Ok(best)
    }
}

/// `d*(f, L)`; builds a fresh [`LevelSetProfile`].
pub fn d_star(spec: &DistributionSpec, l: f64) -> Result<f64> {
    LevelSetProfile::new(spec).d_star(l)
}

/// `\int_lo^hi |h(u)|^j du` for any real `lo <= hi`.
fn signed_power_integral(spec: &DistributionSpec, j: i32, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut breaks = vec![lo, hi];
    for k in spec.cf_kinks() {
        for p in [k, -k] {
            if p > lo && p < hi {
                breaks.push(p);
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let g = |u: f64| {
        let a2 = cf_abs2(spec, u);
        if j == 2 {
            a2
        } else {
            a2.sqrt()
        }
    };
    adaptive_breaks(g, &breaks, ENERGY_TOL)
}

/// `(d_1, d_2)` with `d_j = max_{v in B} \int_B (|h(u-v)|^j + |h(u+v)|^j) du`
/// for the block `B = [a, b]`.
pub fn block_pair_functionals(spec: &DistributionSpec, a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a >= 0.0) || !(b >= a) || !b.is_finite() {
        return Err(Error::domain(format!("block [{a}, {b}] must satisfy 0 <= a <= b")));
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let d_j = |j: i32| {
        let objective = |v: f64| {
            signed_power_integral(spec, j, a - v, b - v) + signed_power_integral(spec, j, a + v, b + v)
        };
        let grid = 101;
        let step = (b - a) / (grid - 1) as f64;
        let (mut best_v, mut best) = (a, f64::NEG_INFINITY);
        for i in 0..grid {
            let v = a + step * i as f64;
            let val = objective(v);
            if val > best {
                best = val;
                best_v = v;
            }
        }
        let v = golden_max(objective, (best_v - step).max(a), (best_v + step).min(b), 1e-10);
        best.max(objective(v))
    };
    Ok((d_j(1), d_j(2)))
}

/// Supremum of Sobolev orders `alpha` for which the Sobolev functional is finite.
pub fn sobolev_index(spec: &DistributionSpec) -> f64 {
    match spec {
        DistributionSpec::Linnik { beta } => beta - 0.5,
        DistributionSpec::PearsonType { rho } => 2.0 * rho - 0.5,
        DistributionSpec::Uniform { .. } => 0.5,
        _ => f64::INFINITY,
    }
}

/// Integral over `[0, inf)` of a function with (at least) exponential decay,
/// accumulated over doubling segments.
fn fast_decay_integral<G: Fn(f64) -> f64>(g: G) -> f64 {
    let mut acc = adaptive(&g, 0.0, 1.0, ENERGY_TOL);
    let mut lo = 1.0;
    for _ in 0..60 {
        let seg = adaptive(&g, lo, 2.0 * lo, ENERGY_TOL);
        acc += seg;
        lo *= 2.0;
        if seg.abs() <= 1e-16 * acc.abs() {
            break;
        }
    }
    acc
}

/// `ln |h(u)|^2`, stable where `|h|^2` underflows.
fn ln_cf_abs2(spec: &DistributionSpec, u: f64) -> f64 {
    let u = u.abs();
    let (weights, centres, exps): (&[f64], &[f64], Vec<f64>) = match spec {
        DistributionSpec::NormalMixture { weights, means, sds } => {
            (weights, means, sds.iter().map(|s| -0.5 * s * s * u * u).collect())
        }
        DistributionSpec::CauchyMixture {
            weights,
            locations,
            scales,
        } => (weights, locations, scales.iter().map(|c| -c * u).collect()),
        _ => return cf_abs2(spec, u).ln(),
    };
    let top = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = weights.iter().sum();
    let mut re = 0.0;
    let mut im = 0.0;
    for ((w, c), e) in weights.iter().zip(centres).zip(&exps) {
        let amp = w * (e - top).exp();
        let (s, co) = (c * u).sin_cos();
        re += amp * co;
        im += amp * s;
    }
    2.0 * top + (re * re + im * im).ln() - 2.0 * total.ln()
}

fn sobolev_value(spec: &DistributionSpec, alpha: f64) -> FunctionalValue {
    if alpha >= sobolev_index(spec) {
        return FunctionalValue::Divergent;
    }
    let d = energy_d(spec);
    let weighted = match spec {
        DistributionSpec::NormalMixture { .. } | DistributionSpec::CauchyMixture { .. } => {
            fast_decay_integral(|u| (2.0 * alpha * u.ln() + ln_cf_abs2(spec, u)).exp())
        }
        DistributionSpec::Linnik { beta } => power_tail_integral(spec, alpha, 2.0 * beta),
        DistributionSpec::PearsonType { rho } => power_tail_integral(spec, alpha, 4.0 * rho),
        DistributionSpec::TriangularCf { s } => {
            adaptive(|u| u.powf(2.0 * alpha) * cf_abs2(spec, u), 0.0, *s, ENERGY_TOL)
        }
        DistributionSpec::Uniform { a, b } => {
            // \int_0^inf x^{mu-1} sin^2 x dx = -Gamma(mu) cos(pi mu / 2) / 2^{mu+1}, -2 < mu < 0.
            let mu = 2.0 * alpha - 1.0;
            let j = -(gamma(mu + 1.0) / mu) * (0.5 * PI * mu).cos() / 2f64.powf(mu + 1.0);
            (2.0 / (b - a)).powf(2.0 * alpha + 1.0) * j
        }
    };
    FunctionalValue::Finite((0.5 * d + weighted) / PI)
}

/// `\int_0^inf u^{2 alpha} |h|^2 du` when `|h(u)|^2 ~ c u^{-p}`.
fn power_tail_integral(spec: &DistributionSpec, alpha: f64, p: f64) -> f64 {
    let g = |s: f64| {
        let u = s.exp();
        u.powf(2.0 * alpha) * cf_abs2(spec, u) * u
    };
    let s_hi = 30.0;
    let body = adaptive_breaks(g, &[-60.0, -5.0, 0.0, 5.0, s_hi], ENERGY_TOL);
    let u = s_hi.exp();
    let tail = u * u.powf(2.0 * alpha) * cf_abs2(spec, u) / (p - 2.0 * alpha - 1.0);
    body + tail
}

fn analytic_value(spec: &DistributionSpec, r: f64, gamma_: f64) -> FunctionalValue {
    match spec {
        DistributionSpec::NormalMixture { sds, .. } => {
            let s = sds.iter().copied().fold(f64::INFINITY, f64::min);
            if r > 2.0 || (r == 2.0 && 2.0 * gamma_ >= s * s) {
                return FunctionalValue::Divergent;
            }
        }
        DistributionSpec::CauchyMixture { scales, .. } => {
            let c = scales.iter().copied().fold(f64::INFINITY, f64::min);
            if r > 1.0 || (r == 1.0 && gamma_ >= c) {
                return FunctionalValue::Divergent;
            }
        }
        DistributionSpec::TriangularCf { s } => {
            let v = adaptive(
                |u| (2.0 * gamma_ * u.powf(r)).exp() * cf_abs2(spec, u),
                0.0,
                *s,
                ENERGY_TOL,
            );
            return FunctionalValue::Finite(v / PI);
        }
        _ => return FunctionalValue::Divergent,
    }
    let v = fast_decay_integral(|u| (2.0 * gamma_ * u.powf(r) + ln_cf_abs2(spec, u)).exp());
    FunctionalValue::Finite(v / PI)
}

/// Class functionals of `spec` for `class`, plus the tail energy beyond
/// `tail_from`. Divergence is reported in the result, not as an error.
pub fn class_functional(
    spec: &DistributionSpec,
    class: &FunctionClass,
    tail_from: f64,
) -> Result<ClassFunctionals> {
    spec.validate()?;
    class.validate()?;
    if !(tail_from >= 0.0) {
        return Err(Error::domain(format!("tail_from must be >= 0, got {tail_from}")));
    }
    let (value, member) = match *class {
        FunctionClass::Sobolev { alpha, q } => {
            let v = sobolev_value(spec, alpha);
            (Some(v), v.value() <= q)
        }
        FunctionClass::Analytic { r, gamma, q } => {
            let v = analytic_value(spec, r, gamma);
            (Some(v), v.value() <= q)
        }
        FunctionClass::BoundedSpectrum { s } => {
            (None, spec.spectrum_edge().is_some_and(|edge| edge <= s))
        }
    };
    Ok(ClassFunctionals {
        class: *class,
        d: energy_d(spec),
        value,
        member,
        tail_from,
        tail_energy: tail_energy(spec, tail_from) / PI,
    })
}
