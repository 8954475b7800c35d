use crate::error::{Error, Result};
use crate::kernels::TestFunction;
use crate::prelude::*;
use crate::quad::{integrate_half_line, integrate_real, QuadConfig};

/// Semicircle density `ν(E) = (2/π) √(1 - E²)`.
pub fn nu(e: f64) -> f64 {
    2.0 / PI * (1.0 - e * e).max(0.0).sqrt()
}

/// `K_d = 2 Re ∫_{R^d} dx / (i + |x|²)²` in closed form.
pub fn k_constant(d: usize) -> Result<f64> {
    match d {
        1 => Ok(-PI / 2f64.sqrt()),
        2 => Ok(0.0),
        3 => Ok(2f64.sqrt() * PI * PI),
        _ => Err(Error::UnsupportedDimension { d }),
    }
}

/// `K_d` from its defining integral in polar coordinates.
pub fn k_constant_quadrature(d: usize) -> Result<f64> {
    let sphere = match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => return Err(Error::UnsupportedDimension { d }),
    };
    let cfg = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-12, max_panels: 50_000 };
    let f = |r: f64| {
        let den = c64(r * r, 1.0);
        c64(r.powi(d as i32 - 1), 0.0) / (den * den)
    };
    let q = integrate_half_line(f, 1.0, cfg)?;
    Ok(2.0 * sphere * q.value.re)
}

/// `V_d(φ_1, φ_2) = ∫ |t|^{1-d/2} conj(φ̂_1(t)) φ̂_2(t) dt` for `d <= 3` and
/// `2 conj(φ̂_1(0)) φ̂_2(0)` for `d = 4`.
///
/// For real `φ_i` the integrand at `-t` is the conjugate of the one at `t`,
/// so the integral is `2 Re ∫_0^∞`; the substitution `t = u²` removes the
/// endpoint singularity.
pub fn v_d_form(d: usize, phi1: &TestFunction, phi2: &TestFunction) -> Result<f64> {
    if d == 4 {
        return Ok(2.0 * (phi1.fourier(0.0).conj() * phi2.fourier(0.0)).re);
    }
    if d > 4 {
        return Err(Error::UnsupportedDimension { d });
    }
    let t_max = phi1.hat_cutoff(1e-16).min(phi2.hat_cutoff(1e-16)).max(1.0);
    let u_max = t_max.sqrt();
    let power = 1.0 - d as f64 / 2.0;
    let f = |u: f64| {
        let t = u * u;
        // |t|^{power} dt = u^{2 power} · 2u du
        let w = 2.0 * u.powf(2.0 * power + 1.0);
        w * (phi1.fourier(t).conj() * phi2.fourier(t)).re
    };
    let cfg = QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_panels: 50_000 };
    let q = integrate_real(f, 0.0, u_max, 16, cfg)?;
    Ok(2.0 * q.value)
}
