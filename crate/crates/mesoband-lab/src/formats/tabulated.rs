//! Test functions tabulated on grids.
//!
//! Two CSV files with headers: `e,phi` for samples of `φ`, and
//! `t,hat_re[,hat_im]` for samples of `φ̂`. Both grids must be strictly
//! increasing with at least four points. Between nodes the samples are
//! joined by natural cubic splines; outside a grid the function is zero.
//! A `φ̂` grid starting at `t = 0` is extended to negative times by
//! `φ̂(-t) = conj φ̂(t)`.

use crate::error::{LabError, Result};
use mesoband::kernels::{CustomSpec, TestFunction};
use mesoband::Complex64;
use serde::Deserialize;
use std::f64::consts::PI;
use std::io::Read;
use std::sync::Arc;

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the nodes.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 4 || y.len() != n {
            return Err(LabError::format("grid", format!("need at least 4 paired samples, got {n}")));
        }
        if x.windows(2).any(|p| !(p[1] > p[0])) || x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(LabError::format("grid", "nodes must be finite and strictly increasing"));
        }
        // Thomas algorithm on the interior equations.
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let r = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            let denom = b - a * c[i - 1];
            c[i] = (h1 / 6.0) / denom;
            rhs[i] = (r - a * rhs[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = rhs[i] - c[i] * m[i + 1];
        }
        Ok(Self { x, y, m })
    }

    pub fn lo(&self) -> f64 {
        self.x[0]
    }

    pub fn hi(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    /// The interpolant, zero outside the grid.
    pub fn eval(&self, t: f64) -> f64 {
        if !(t >= self.lo() && t <= self.hi()) {
            return 0.0;
        }
        let i = self.x.partition_point(|&v| v <= t).clamp(1, self.x.len() - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        let (a, b) = ((self.x[i + 1] - t) / h, (t - self.x[i]) / h);
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValueRow {
    e: f64,
    phi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HatRow {
    t: f64,
    hat_re: f64,
    #[serde(default)]
    hat_im: f64,
}

fn rows<T: for<'de> Deserialize<'de>, R: Read>(r: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(r).deserialize().map(|row| row.map_err(LabError::from)).collect()
}

/// Loads a tabulated test function with declared decay exponent `q`.
///
/// The two tables must agree on `∫φ = 2π φ̂(0)` to one percent
/// (trapezoid rule on the `φ` grid).
pub fn load_test_function<R1: Read, R2: Read>(name: &str, values: R1, hats: R2, q: f64) -> Result<TestFunction> {
    let v: Vec<ValueRow> = rows(values)?;
    let mut h: Vec<HatRow> = rows(hats)?;
    let phi = CubicSpline::new(v.iter().map(|r| r.e).collect(), v.iter().map(|r| r.phi).collect())?;
    if h.first().map(|r| r.t) == Some(0.0) {
        let mirrored: Vec<HatRow> =
            h[1..].iter().rev().map(|r| HatRow { t: -r.t, hat_re: r.hat_re, hat_im: -r.hat_im }).collect();
        h = mirrored.into_iter().chain(h).collect();
    }
    let ts: Vec<f64> = h.iter().map(|r| r.t).collect();
    let re = CubicSpline::new(ts.clone(), h.iter().map(|r| r.hat_re).collect())?;
    let im = CubicSpline::new(ts, h.iter().map(|r| r.hat_im).collect())?;

    let integral: f64 = v.windows(2).map(|p| 0.5 * (p[0].phi + p[1].phi) * (p[1].e - p[0].e)).sum();
    let h0 = re.eval(0.0);
    if (integral - 2.0 * PI * h0).abs() > 0.01 * integral.abs().max(1e-300) {
        return Err(LabError::format(
            "test function tables",
            format!("∫φ = {integral} but 2π φ̂(0) = {}", 2.0 * PI * h0),
        ));
    }
    let (lo, hi) = (phi.lo(), phi.hi());
    let reach = re.hi().max(-re.lo());
    let (re, im) = (Arc::new(re), Arc::new(im));
    let (re2, im2) = (re.clone(), im.clone());
    let spec = CustomSpec {
        name: name.into(),
        value: Some(Arc::new(move |e| phi.eval(e))),
        fourier: Some(Arc::new(move |t| Complex64::new(re.eval(t), im.eval(t)))),
        q,
        support: Some((lo, hi)),
        hat_cutoff: Some(Arc::new(move |tol: f64| {
            let scale = re2.eval(0.0).abs();
            let mut t = reach;
            while t > 0.0 && Complex64::new(re2.eval(t), im2.eval(t)).norm() < tol * scale {
                t -= reach / 4096.0;
            }
            (t + reach / 4096.0).min(reach)
        })),
    };
    Ok(TestFunction::custom(spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubics_in_the_interior() {
        let x: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let s = CubicSpline::new(x, y).unwrap();
        for t in [0.55, 1.23, 2.9] {
            assert!((s.eval(t) - f64::sin(t)).abs() < 1e-5);
        }
        assert_eq!(s.eval(-0.1), 0.0);
        assert_eq!(s.eval(0.3), 0.3f64.sin());
    }

    fn gaussian_tables(mismatch: f64) -> (String, String) {
        let mut a = String::from("e,phi\n");
        for i in -400..=400 {
            let e = i as f64 * 0.025;
            a += &format!("{e},{}\n", (2.0 * PI).sqrt() * (-0.5 * e * e).exp());
        }
        let mut b = String::from("t,hat_re\n");
        for i in 0..=400 {
            let t = i as f64 * 0.025;
            b += &format!("{t},{}\n", mismatch * (-0.5 * t * t).exp());
        }
        (a, b)
    }

    #[test]
    fn tabulated_gaussian_matches_builtin() {
        let (a, b) = gaussian_tables(1.0);
        let phi = load_test_function("tab", a.as_bytes(), b.as_bytes(), 50.0).unwrap();
        let g = TestFunction::gaussian();
        for e in [-1.3, 0.0, 0.7] {
            assert!((phi.value(e) - g.value(e)).abs() < 1e-6);
            assert!((phi.fourier(-e) - g.fourier(e)).norm() < 1e-6);
        }
        let t = phi.hat_cutoff(1e-8);
        assert!((t - g.hat_cutoff(1e-8)).abs() < 0.05, "{t}");
    }

    #[test]
    fn rejects_inconsistent_pair() {
        let (a, b) = gaussian_tables(1.5);
        assert!(load_test_function("tab", a.as_bytes(), b.as_bytes(), 50.0).is_err());
        assert!(load_test_function("tab", "e,phi\n0,1\n".as_bytes(), b.as_bytes(), 2.0).is_err());
    }
}
