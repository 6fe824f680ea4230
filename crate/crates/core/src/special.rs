//! Special functions not covered by `statrs`.

use crate::quad::{adaptive, Tolerance};

/// Fills `out[k] = j_k(omega)` (spherical Bessel functions of the first kind)
/// for `k = 0..out.len()`.
pub fn spherical_bessel_j(omega: f64, out: &mut [f64]) {
    let m = out.len();
    if m == 0 {
        return;
    }
    let w = omega.abs();
    if w < 1e-4 {
        series(w, out);
    } else if w >= m as f64 {
        upward(w, out);
    } else {
        miller(w, out);
    }
    if omega < 0.0 {
        for v in out.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
}

fn series(w: f64, out: &mut [f64]) {
    let w2 = w * w;
    let mut lead = 1.0;
    for (k, v) in out.iter_mut().enumerate() {
        if k > 0 {
            lead *= w / (2 * k + 1) as f64;
        }
        let kf = k as f64;
        *v = lead * (1.0 - w2 / (2.0 * (2.0 * kf + 3.0)));
    }
}

fn upward(w: f64, out: &mut [f64]) {
    let (s, c) = w.sin_cos();
    out[0] = s / w;
    if out.len() > 1 {
        out[1] = s / (w * w) - c / w;
    }
    for k in 1..out.len().saturating_sub(1) {
        out[k + 1] = (2 * k + 1) as f64 / w * out[k] - out[k - 1];
    }
}

fn miller(w: f64, out: &mut [f64]) {
    let m = out.len();
    let start = m + 20 + w as usize;
    let mut f_next = 0.0;
    let mut f = 1e-30;
    for k in (1..=start).rev() {
        let f_prev = (2 * k + 1) as f64 / w * f - f_next;
        f_next = f;
        f = f_prev;
        if k - 1 < m {
            out[k - 1] = f;
        }
        if f.abs() > 1e150 {
            f *= 1e-150;
            f_next *= 1e-150;
            for v in out.iter_mut().skip(k - 1) {
                *v *= 1e-150;
            }
        }
    }
    let (s, c) = w.sin_cos();
    let j0 = s / w;
    let j1 = s / (w * w) - c / w;
    let scale = if j0.abs() >= j1.abs() || m == 1 {
        j0 / out[0]
    } else {
        j1 / out[1]
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
}

/// Modified Bessel function of the second kind `K_nu(z)` for `z > 0`,
/// from `K_nu(z) = \int_0^\infty exp(-z cosh t) cosh(nu t) dt`.
pub fn bessel_k(nu: f64, z: f64) -> f64 {
    assert!(z > 0.0, "bessel_k needs z > 0");
    if z > 745.0 {
        return 0.0;
    }
    // Past t_max the integrand is below exp(-750) relative to its peak.
    let t_max = (1.0 + 750.0 / z).acosh();
    let f = |t: f64| (-z * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
    let tol = Tolerance {
        rel: 1e-12,
        abs: 0.0,
    };
    adaptive(f, 0.0, t_max, tol) * (-z).exp()
}

/// Sine integral `Si(x) = \int_0^x sin(t)/t dt`.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x <= 30.0 {
        let mut breaks = vec![0.0];
        let mut k = 1.0;
        while k * std::f64::consts::PI < x {
            breaks.push(k * std::f64::consts::PI);
            k += 1.0;
        }
        breaks.push(x);
        let tol = Tolerance {
            rel: 1e-14,
            abs: 1e-16,
        };
        return crate::quad::adaptive_breaks(
            |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t },
            &breaks,
            tol,
        );
    }
    // Asymptotic auxiliary functions, truncated at the smallest term.
    let (mut f, mut g) = (0.0, 0.0);
    let mut term_f = 1.0 / x;
    let mut term_g = 1.0 / (x * x);
    let x2 = x * x;
    for k in 0..40 {
        f += term_f;
        g += term_g;
        let kf = k as f64;
        let next_f = -term_f * (2.0 * kf + 1.0) * (2.0 * kf + 2.0) / x2;
        let next_g = -term_g * (2.0 * kf + 2.0) * (2.0 * kf + 3.0) / x2;
        if next_f.abs() >= term_f.abs() || next_f.abs() < 1e-18 * f.abs() {
            break;
        }
        term_f = next_f;
        term_g = next_g;
    }
    std::f64::consts::FRAC_PI_2 - f * x.cos() - g * x.sin()
}
