//! Gauss–Legendre quadrature: fixed rules, global adaptive integration,
//! exponentially mapped rules for the real line, and a Filon-type rule for
//! Fourier integrals of smooth functions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::special::spherical_bessel_j;

/// Nodes and weights of an `order`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }

    /// Composite rule on `panels` equal sub-intervals of `[a, b]`.
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + width * p as f64;
            let hi = if p + 1 == panels { b } else { lo + width };
            total += self.integrate(lo, hi, &mut f);
        }
        total
    }
}

/// Returns `(P_n(x), P_n'(x))`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub(crate) fn gl10() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(10))
}

pub(crate) fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-8,
            abs: 1e-12,
        }
    }
}

const MAX_INTERVALS: usize = 20_000;

struct Piece {
    a: f64,
    b: f64,
    /// 10-point value on the halves (the estimate).
    fine: f64,
    left: f64,
    right: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn make_piece<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, coarse: f64) -> Piece {
    let rule = gl10();
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, &mut *f);
    let right = rule.integrate(m, b, &mut *f);
    let fine = left + right;
    Piece {
        a,
        b,
        fine,
        left,
        right,
        err: (fine - coarse).abs(),
    }
}

/// Global adaptive Gauss–Legendre integration over `[a, b]`.
pub fn adaptive<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> f64 {
    adaptive_breaks(f, &[a, b], tol)
}

/// Adaptive integration over `[breaks[0], breaks[last]]` with the initial
/// partition given by `breaks` (ascending).
pub fn adaptive_breaks<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], tol: Tolerance) -> f64 {
    if breaks.len() < 2 {
        return 0.0;
    }
    let rule = gl10();
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let coarse = rule.integrate(w[0], w[1], &mut f);
            heap.push(make_piece(&mut f, w[0], w[1], coarse));
        }
    }
    loop {
        let (total, err) = heap
            .iter()
            .fold((0.0, 0.0), |(s, e), p| (s + p.fine, e + p.err));
        if err <= tol.abs.max(tol.rel * total.abs()) || heap.len() >= MAX_INTERVALS {
            if heap.len() >= MAX_INTERVALS {
                log::debug!("adaptive quadrature hit the interval cap; error estimate {err:e}");
            }
            return sum_in_order(heap.into_vec());
        }
        let worst = heap.pop().expect("heap is nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Interval no longer divisible in floating point: accept it.
            let mut frozen = worst;
            frozen.err = 0.0;
            heap.push(frozen);
            continue;
        }
        heap.push(make_piece(&mut f, worst.a, m, worst.left));
        heap.push(make_piece(&mut f, m, worst.b, worst.right));
    }
}

/// Sums piece estimates in ascending position so results do not depend on
/// heap layout.
fn sum_in_order(mut pieces: Vec<Piece>) -> f64 {
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    neumaier_sum(pieces.iter().map(|p| p.fine))
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = Neumaier::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Weighted nodes `(x, w)` approximating `\int_{-\infty}^{\infty} g(x) dx`.
///
/// The line is cut at the sorted `breaks`; every piece is mapped
/// exponentially toward its nearer break (`x = p ± e^s`), which absorbs
/// integrable endpoint singularities and algebraic tails alike.
pub fn real_line_nodes(breaks: &[f64], panel_width: f64) -> Vec<(f64, f64)> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|b| b.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.is_empty() {
        pts.push(0.0);
    }
    let s_lo = -40.0;
    let s_tail = 45.0;
    let mut out = Vec::new();
    // Left tail: x = p0 - e^s.
    mapped_half(&mut out, pts[0], -1.0, s_lo, s_tail, panel_width);
    for w in pts.windows(2) {
        let half = 0.5 * (w[1] - w[0]);
        let s_hi = half.ln();
        mapped_half(&mut out, w[0], 1.0, s_lo, s_hi, panel_width);
        mapped_half(&mut out, w[1], -1.0, s_lo, s_hi, panel_width);
    }
    mapped_half(&mut out, pts[pts.len() - 1], 1.0, s_lo, s_tail, panel_width);
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn mapped_half(out: &mut Vec<(f64, f64)>, p: f64, dir: f64, s_lo: f64, s_hi: f64, width: f64) {
    if s_hi <= s_lo {
        return;
    }
    let rule = gl16();
    let panels = ((s_hi - s_lo) / width).ceil().max(1.0) as usize;
    let h = (s_hi - s_lo) / panels as f64;
    for k in 0..panels {
        let c = s_lo + h * (k as f64 + 0.5);
        for (t, w) in rule.nodes().iter().zip(rule.weights()) {
            let s = c + 0.5 * h * t;
            let e = s.exp();
            out.push((p + dir * e, 0.5 * h * w * e));
        }
    }
}

/// A Legendre expansion `g(c + w t) ≈ Σ_j a_j P_j(t)` on one panel `[c-w, c+w]`.
#[derive(Debug, Clone)]
pub struct LegendrePanel {
    pub center: f64,
    pub half_width: f64,
    pub coeffs: Vec<Complex64>,
}

impl LegendrePanel {
    /// `\int_{panel} g(u) e^{iux} du` from the Rayleigh expansion of the
    /// plane wave; `scratch` must hold at least `coeffs.len()` values.
    pub fn fourier(&self, x: f64, scratch: &mut [f64]) -> Complex64 {
        let m = self.coeffs.len();
        let j = &mut scratch[..m];
        spherical_bessel_j(x * self.half_width, j);
        // Σ a_k 2 i^k j_k, with i^k cycling 1, i, -1, -i.
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, (a, &jk)) in self.coeffs.iter().zip(j.iter()).enumerate() {
            match k % 4 {
                0 => {
                    re += a.re * jk;
                    im += a.im * jk;
                }
                1 => {
                    re -= a.im * jk;
                    im += a.re * jk;
                }
                2 => {
                    re -= a.re * jk;
                    im -= a.im * jk;
                }
                _ => {
                    re += a.im * jk;
                    im -= a.re * jk;
                }
            }
        }
        let phase = Complex64::from_polar(1.0, x * self.center);
        phase * Complex64::new(re, im) * (2.0 * self.half_width)
    }

    /// Plain integral of the expansion over the panel.
    pub fn integral(&self) -> Complex64 {
        self.coeffs[0] * (2.0 * self.half_width)
    }
}

/// Legendre order used by [`legendre_fit`].
pub const FIT_ORDER: usize = 16;

struct FitRule {
    nodes: Vec<f64>,
    /// `proj[j][i] = (2j+1)/2 · w_i · P_j(t_i)`
    proj: Vec<Vec<f64>>,
}

fn fit_rule() -> &'static FitRule {
    static RULE: OnceLock<FitRule> = OnceLock::new();
    RULE.get_or_init(|| {
        let gl = GaussLegendre::new(FIT_ORDER);
        let mut proj = vec![vec![0.0; FIT_ORDER]; FIT_ORDER];
        for (i, (&t, &w)) in gl.nodes().iter().zip(gl.weights()).enumerate() {
            let mut p0 = 1.0;
            let mut p1 = t;
            for (j, row) in proj.iter_mut().enumerate() {
                let pj = match j {
                    0 => 1.0,
                    1 => t,
                    _ => {
                        let p2 = ((2 * j - 1) as f64 * t * p1 - (j - 1) as f64 * p0) / j as f64;
                        p0 = p1;
                        p1 = p2;
                        p2
                    }
                };
                row[i] = 0.5 * (2 * j + 1) as f64 * w * pj;
            }
        }
        FitRule {
            nodes: gl.nodes().to_vec(),
            proj,
        }
    })
}

/// Piecewise Legendre approximation of `g` on `[a, b]`, refined by bisection
/// until the trailing coefficients are negligible. `breaks` inside `(a, b)`
/// are forced panel edges (kinks of `g`). Panels where `|g|` stays below
/// `drop_below` are omitted.
pub fn legendre_fit<G: Fn(f64) -> Complex64>(
    g: &G,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    drop_below: f64,
) -> Vec<LegendrePanel> {
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    edges.extend(inner);
    edges.push(b);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        fit_interval(g, w[0], w[1], abs_tol, drop_below, 0, &mut out);
    }
    out
}

fn fit_interval<G: Fn(f64) -> Complex64>(
    g: &G,
    a: f64,
    b: f64,
    abs_tol: f64,
    drop_below: f64,
    depth: usize,
    out: &mut Vec<LegendrePanel>,
) {
    let rule = fit_rule();
    let c = 0.5 * (a + b);
    let w = 0.5 * (b - a);
    let vals: Vec<Complex64> = rule.nodes.iter().map(|t| g(c + w * t)).collect();
    let peak = vals.iter().map(|v| v.norm()).fold(g(a).norm().max(g(b).norm()), f64::max);
    if peak < drop_below {
        return;
    }
    let coeffs: Vec<Complex64> = rule
        .proj
        .iter()
        .map(|row| row.iter().zip(&vals).map(|(p, v)| v * p).sum())
        .collect();
    let tail = coeffs[FIT_ORDER - 1].norm() + coeffs[FIT_ORDER - 2].norm();
    let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let converged = tail <= 1e-13 * scale || tail * 2.0 * w <= abs_tol;
    if converged || depth >= 60 || w <= f64::EPSILON * c.abs().max(1.0) {
        out.push(LegendrePanel {
            center: c,
            half_width: w,
            coeffs,
        });
    } else {
        fit_interval(g, a, c, abs_tol, drop_below, depth + 1, out);
        fit_interval(g, c, b, abs_tol, drop_below, depth + 1, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for order in [1usize, 2, 5, 10, 16, 33] {
            let rule = GaussLegendre::new(order);
            let wsum: f64 = rule.weights().iter().sum();
            assert_relative_eq!(wsum, 2.0, epsilon = 1e-14);
            let deg = 2 * order - 1;
            let got = rule.integrate(0.0, 2.0, |x| x.powi(deg as i32));
            let want = 2f64.powi(deg as i32 + 1) / (deg as f64 + 1.0);
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let got = adaptive(|x: f64| x.powf(-0.5), 0.0, 1.0, Tolerance::default());
        assert_relative_eq!(got, 2.0, max_relative = 1e-7);
    }

    #[test]
    fn adaptive_oscillatory() {
        let got = adaptive(|x: f64| (50.0 * x).cos(), 0.0, 3.0, Tolerance::default());
        assert_relative_eq!(got, (150f64).sin() / 50.0, max_relative = 1e-8);
    }

    #[test]
    fn real_line_rule_integrates_cauchy_and_gaussian() {
        let nodes = real_line_nodes(&[0.0], 0.125);
        let cauchy: f64 = nodes
            .iter()
            .map(|&(x, w)| w / (std::f64::consts::PI * (1.0 + x * x)))
            .sum();
        assert_relative_eq!(cauchy, 1.0, max_relative = 1e-12);
        let nodes = real_line_nodes(&[-1.0, 2.0], 0.125);
        let gauss: f64 = nodes.iter().map(|&(x, w)| w * (-x * x).exp()).sum();
        assert_relative_eq!(gauss, std::f64::consts::PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn filon_panels_match_closed_form_fourier_integral() {
        // \int_0^3 e^{-u} e^{iux} du = (1 - e^{(ix-1)3}) / (1 - ix)
        let g = |u: f64| Complex64::new((-u).exp(), 0.0);
        let panels = legendre_fit(&g, 0.0, 3.0, &[], 1e-15, 0.0);
        let mut scratch = [0.0; FIT_ORDER];
        for &x in &[0.0, 0.3, -2.0, 17.0, 250.0, 1e4] {
            let got: Complex64 = panels.iter().map(|p| p.fourier(x, &mut scratch)).sum();
            let z = Complex64::new(-1.0, x);
            let want = ((z * 3.0).exp() - 1.0) / z;
            assert!((got - want).norm() < 1e-13, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn filon_fit_resolves_a_kink_given_as_break() {
        let g = |u: f64| Complex64::new((1.0 - u).max(0.0), 0.0);
        let panels = legendre_fit(&g, 0.0, 2.66, &[1.0], 1e-15, 1e-17);
        assert_eq!(panels.len(), 1);
        let total: Complex64 = panels.iter().map(|p| p.integral()).sum();
        assert_relative_eq!(total.re, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier_sum(v), 2.0);
    }
}
