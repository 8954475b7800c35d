//! Adaptive Gauss–Kronrod (7/15) quadrature for complex and vector-valued
//! integrands.

use crate::error::{Error, Result};
use crate::prelude::*;
use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances and limits for [`integrate`] and [`integrate_vec`].
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-11, max_panels: 20_000 }
    }
}

/// Result of a quadrature with its error estimate.
#[derive(Debug, Clone)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

/// Evaluation points of the 15-point rule on `[a, b]`, centre first.
fn nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut x = [c; 15];
    for j in 0..7 {
        x[1 + 2 * j] = c - h * XGK[j];
        x[2 + 2 * j] = c + h * XGK[j];
    }
    x
}

/// Kronrod sum and Gauss sum for values laid out like [`nodes`].
fn rule(h: f64, f: &[Complex64; 15]) -> (Complex64, Complex64) {
    let mut k = f[0] * WGK[7];
    let mut g = f[0] * WG[3];
    for j in 0..7 {
        let pair = f[1 + 2 * j] + f[2 + 2 * j];
        k += pair * WGK[j];
        if j % 2 == 1 {
            g += pair * WG[j / 2];
        }
    }
    (k * h, g * h)
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Integrates a complex function over `[a, b]`, starting from `initial`
/// equal panels and bisecting the worst panel until the tolerance is met.
pub fn integrate(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    initial: usize,
    cfg: QuadConfig,
) -> Result<Quadrature<Complex64>> {
    let eval = |lo: f64, hi: f64| {
        let x = nodes(lo, hi);
        let mut v = [Complex64::new(0.0, 0.0); 15];
        for (vi, xi) in v.iter_mut().zip(x.iter()) {
            *vi = f(*xi);
        }
        let (k, g) = rule(0.5 * (hi - lo), &v);
        Panel { a: lo, b: hi, value: k, error: (k - g).norm() }
    };
    let pieces = initial.max(1);
    let width = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::new();
    let (mut total, mut err) = (Complex64::new(0.0, 0.0), 0.0);
    for i in 0..pieces {
        let hi = if i + 1 == pieces { b } else { a + width * (i + 1) as f64 };
        let p = eval(a + width * i as f64, hi);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    while err > cfg.abs_tol.max(cfg.rel_tol * total.norm()) {
        if heap.len() >= cfg.max_panels {
            return Err(Error::Quadrature { estimate: err });
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.a + worst.b);
        let (l, r) = (eval(worst.a, mid), eval(mid, worst.b));
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
    }
    // Re-add from scratch so the returned value is not polluted by
    // cancellation in the running update.
    let value = heap.iter().fold(Complex64::new(0.0, 0.0), |s, p| s + p.value);
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Quadrature { value, error, panels: heap.len() })
}

/// Vector-valued version: `f(t, out)` fills `out` with `width` components.
/// The error of a panel is the largest component error; the tolerance is
/// relative to the largest component of the total.
pub fn integrate_vec(
    f: impl Fn(f64, &mut [Complex64]),
    width: usize,
    a: f64,
    b: f64,
    initial: usize,
    cfg: QuadConfig,
) -> Result<Quadrature<Vec<Complex64>>> {
    let zero = Complex64::new(0.0, 0.0);
    let mut scratch = vec![zero; 15 * width];
    let mut eval = |lo: f64, hi: f64| {
        let x = nodes(lo, hi);
        for (i, xi) in x.iter().enumerate() {
            f(*xi, &mut scratch[i * width..(i + 1) * width]);
        }
        let h = 0.5 * (hi - lo);
        let mut value = vec![zero; width];
        let mut error = 0.0f64;
        let mut col = [zero; 15];
        for (c, v) in value.iter_mut().enumerate() {
            for (i, ci) in col.iter_mut().enumerate() {
                *ci = scratch[i * width + c];
            }
            let (k, g) = rule(h, &col);
            *v = k;
            error = error.max((k - g).norm());
        }
        Panel { a: lo, b: hi, value, error }
    };
    let pieces = initial.max(1);
    let step = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::new();
    let mut total = vec![zero; width];
    let mut err = 0.0;
    for i in 0..pieces {
        let hi = if i + 1 == pieces { b } else { a + step * (i + 1) as f64 };
        let p = eval(a + step * i as f64, hi);
        for (t, v) in total.iter_mut().zip(&p.value) {
            *t += v;
        }
        err += p.error;
        heap.push(p);
    }
    let scale = |t: &[Complex64]| t.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    while err > cfg.abs_tol.max(cfg.rel_tol * scale(&total)) {
        if heap.len() >= cfg.max_panels {
            return Err(Error::Quadrature { estimate: err });
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.a + worst.b);
        let (l, r) = (eval(worst.a, mid), eval(mid, worst.b));
        for (i, t) in total.iter_mut().enumerate() {
            *t += l.value[i] + r.value[i] - worst.value[i];
        }
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
    }
    let mut value = vec![zero; width];
    let mut panels: Vec<&Panel<Vec<Complex64>>> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
    for p in &panels {
        for (v, x) in value.iter_mut().zip(&p.value) {
            *v += x;
        }
    }
    let error = panels.iter().map(|p| p.error).sum();
    Ok(Quadrature { value, error, panels: panels.len() })
}

/// Real integral over `[a, b]`.
pub fn integrate_real(f: impl Fn(f64) -> f64, a: f64, b: f64, initial: usize, cfg: QuadConfig) -> Result<Quadrature<f64>> {
    let q = integrate(|x| Complex64::new(f(x), 0.0), a, b, initial, cfg)?;
    Ok(Quadrature { value: q.value.re, error: q.error, panels: q.panels })
}

/// Integral over the whole real line via `x = c + s·u/(1 - u²)`, suitable
/// for integrands with algebraic decay.
pub fn integrate_line(f: impl Fn(f64) -> f64, centre: f64, scale: f64, cfg: QuadConfig) -> Result<Quadrature<f64>> {
    let g = |u: f64| {
        let d = 1.0 - u * u;
        if d <= 0.0 {
            return 0.0;
        }
        let x = centre + scale * u / d;
        let jac = scale * (1.0 + u * u) / (d * d);
        let v = f(x) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_real(g, -1.0, 1.0, 32, cfg)
}

/// Integral over `[0, ∞)` via `t = s·u/(1 - u)`.
pub fn integrate_half_line(f: impl Fn(f64) -> Complex64, scale: f64, cfg: QuadConfig) -> Result<Quadrature<Complex64>> {
    let g = |u: f64| {
        let d = 1.0 - u;
        if d <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let t = scale * u / d;
        let v = f(t) * (scale / (d * d));
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    integrate(g, 0.0, 1.0, 32, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate_real(|x| x.powi(7) - 3.0 * x * x, 0.0, 2.0, 1, QuadConfig::default()).unwrap();
        assert!((q.value - (256.0 / 8.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex() {
        let q = integrate(|t| c64(0.0, 3.0 * t).exp(), 0.0, 10.0, 8, QuadConfig::default()).unwrap();
        let exact = (c64(0.0, 30.0).exp() - 1.0) / c64(0.0, 3.0);
        assert!((q.value - exact).norm() < 1e-11);
    }

    #[test]
    fn vector_components() {
        let q = integrate_vec(
            |t, out| {
                out[0] = c64(t.cos(), 0.0);
                out[1] = c64(0.0, (-t).exp());
            },
            2,
            0.0,
            5.0,
            4,
            QuadConfig::default(),
        )
        .unwrap();
        assert!((q.value[0].re - 5f64.sin()).abs() < 1e-12);
        assert!((q.value[1].im - (1.0 - (-5f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn whole_line_cauchy() {
        let q = integrate_line(|x| 2.0 / (x * x + 1.0), 0.0, 1.0, QuadConfig::default()).unwrap();
        assert!((q.value - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn half_line_exponential() {
        let q = integrate_half_line(|t| c64((-t).exp(), 0.0), 1.0, QuadConfig::default()).unwrap();
        assert!((q.value.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reports_failure() {
        let cfg = QuadConfig { abs_tol: 1e-300, rel_tol: 0.0, max_panels: 4 };
        assert!(matches!(
            integrate_real(|x| x.abs().sqrt(), -1.0, 1.0, 1, cfg),
            Err(Error::Quadrature { .. })
        ));
    }
}
