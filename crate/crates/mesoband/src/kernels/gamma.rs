use super::expansion::minus_i_pow;
use crate::error::{Error, Result};
use crate::prelude::*;

/// `e^{i arcsin z}` on the branch analytic in the upper half-plane and
/// continuous up to the real axis: the root of `u² - 2izu - 1 = 0` with
/// `|u| <= 1`, taking `Re u >= 0` on the unit circle.
pub fn unit_root(z: Complex64) -> Complex64 {
    let s = (c64(1.0, 0.0) - z * z).sqrt();
    let iz = c64(-z.im, z.re);
    let (p, m) = (iz + s, iz - s);
    let (np, nm) = (p.norm(), m.norm());
    if (np - nm).abs() <= 1e-14 * np.max(nm) {
        if p.re >= m.re {
            p
        } else {
            m
        }
    } else if np < nm {
        p
    } else {
        m
    }
}

/// `arcsin z` on the upper-half-plane branch.
pub fn arcsin_upper(z: Complex64) -> Complex64 {
    let u = unit_root(z);
    c64(0.0, -1.0) * u.ln()
}

/// `γ_n(E) = ∫_0^∞ e^{iEt} a_n(t) dt = 2(-i)^n e^{i(n+1) arcsin E} / (1 + e^{2i arcsin E}/(M-1))`.
///
/// The `+` comes from `(-i)^{n+2k} = (-1)^k (-i)^n` in the geometric sum over `k`.
pub fn gamma_n(n: usize, e: Complex64, mass: f64) -> Result<Complex64> {
    Ok(gamma_sequence(n, e, mass)?[n])
}

/// `γ_0(E), …, γ_{n_max}(E)`.
pub fn gamma_sequence(n_max: usize, e: Complex64, mass: f64) -> Result<Vec<Complex64>> {
    if e.im < 0.0 {
        return Err(Error::InvalidArgument("gamma_n needs Im E >= 0".into()));
    }
    let u = unit_root(e);
    let denom = c64(1.0, 0.0) + u * u / (mass - 1.0);
    let mut pow = u * 2.0 / denom;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        out.push(minus_i_pow(n) * pow);
        pow *= u;
    }
    Ok(out)
}
