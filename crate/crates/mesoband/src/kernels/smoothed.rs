use super::expansion::a_sequence;
use super::gamma::gamma_sequence;
use super::test_function::{TestFunction, TestKind};
use crate::error::{invalid, Error, Result};
use crate::prelude::*;
use crate::quad::{integrate_real, integrate_vec, QuadConfig};

/// Energy resolution `η = M^{-ρ}` and the truncation exponents `μ`, `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionParams {
    pub eta: f64,
    pub rho: f64,
    pub mu: Option<f64>,
    pub delta: Option<f64>,
}

fn check_exponents(rho: f64, mu: f64, delta: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0 / 3.0) {
        return Err(invalid(alloc::format!("rho = {rho} outside (0, 1/3)")));
    }
    if !(mu > rho && mu < 1.0 / 3.0) {
        return Err(invalid(alloc::format!("mu = {mu} outside (rho, 1/3)")));
    }
    let gap = mu - rho;
    if !(2.0 * delta < gap && gap < 3.0 * delta) {
        return Err(invalid(alloc::format!("need 2 delta < mu - rho < 3 delta, got delta = {delta}")));
    }
    Ok(())
}

impl ExpansionParams {
    /// `η = M^{-ρ}` with explicit `μ` and `δ`, all validated.
    pub fn new(mass: f64, rho: f64, mu: f64, delta: f64) -> Result<Self> {
        if !(mass > 1.0) {
            return Err(Error::DegenerateMass { m: mass });
        }
        check_exponents(rho, mu, delta)?;
        Ok(Self { eta: mass.powf(-rho), rho, mu: Some(mu), delta: Some(delta) })
    }

    /// Derives `ρ = -log η / log M`. When `ρ` is inside `(0, 1/3)`,
    /// `μ` is set halfway to `1/3` and `δ = (μ - ρ)/2.5`; otherwise both stay
    /// unset and only the untruncated coefficients are available.
    pub fn from_eta(eta: f64, mass: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(invalid("eta must be positive"));
        }
        if !(mass > 1.0) {
            return Err(Error::DegenerateMass { m: mass });
        }
        let rho = -eta.ln() / mass.ln();
        let (mu, delta) = if rho > 0.0 && rho < 1.0 / 3.0 {
            let mu = 0.5 * (rho + 1.0 / 3.0);
            (Some(mu), Some((mu - rho) / 2.5))
        } else {
            (None, None)
        };
        Ok(Self { eta, rho, mu, delta })
    }

    /// Replaces `μ` and `δ`, validating against `ρ`.
    pub fn with_truncation(mut self, mu: f64, delta: f64) -> Result<Self> {
        check_exponents(self.rho, mu, delta)?;
        self.mu = Some(mu);
        self.delta = Some(delta);
        Ok(self)
    }

    /// Whether `0 < ρ < 1/3`.
    pub fn in_regime(&self) -> bool {
        self.rho > 0.0 && self.rho < 1.0 / 3.0
    }

    /// `M^{ρ+δ}`, the time at which `γ̃_n` truncates.
    pub fn cutoff_time(&self, mass: f64) -> Option<f64> {
        self.delta.map(|d| mass.powf(self.rho + d))
    }

    /// `M^μ`, the cap on the total path length in the dumbbell sum.
    pub fn path_cap(&self, mass: f64) -> Option<f64> {
        self.mu.map(|mu| mass.powf(mu))
    }
}

fn check_energy(e: f64) -> Result<()> {
    if !(e.abs() < 1.0) {
        return Err(invalid(alloc::format!("energy {e} outside (-1, 1)")));
    }
    Ok(())
}

/// `∫_0^T e^{iEt} φ̂(ηt) a_n(t) dt` for `n = 0..=n_max`.
fn weighted_integral(
    n_max: usize,
    e: f64,
    eta: f64,
    phi: &TestFunction,
    mass: f64,
    t_max: f64,
    tol: f64,
) -> Result<Vec<Complex64>> {
    if t_max <= 0.0 {
        return Ok(vec![c64(0.0, 0.0); n_max + 1]);
    }
    let panel = PI / (2.0 * e.abs() + 2.0);
    let initial = ((t_max / panel).ceil() as usize).max(4);
    let cfg = QuadConfig { abs_tol: tol, rel_tol: tol, max_panels: initial + 200_000 };
    let f = |t: f64, out: &mut [Complex64]| {
        let w = c64(0.0, e * t).exp() * phi.fourier(eta * t);
        let a = a_sequence(t, mass, n_max, 1e-17);
        for (o, an) in out.iter_mut().zip(a) {
            *o = w * an;
        }
    };
    Ok(integrate_vec(f, n_max + 1, 0.0, t_max, initial, cfg)?.value)
}

/// `(ψ^η ∗ γ_n)(E) = ∫_0^∞ e^{iEt} φ̂(ηt) a_n(t) dt`.
pub fn smoothed_gamma(n: usize, e: f64, params: &ExpansionParams, phi: &TestFunction, mass: f64) -> Result<Complex64> {
    Ok(smoothed_gamma_all(n, e, params.eta, phi, mass, 1e-12)?[n])
}

/// `(ψ^η ∗ γ_n)(E)` for `n = 0..=n_max`. The Cauchy kernel is closed-form,
/// `γ_n(E + iη)`; other kinds are integrated up to the time where
/// `|φ̂(ηt)|` falls below `tol`.
pub fn smoothed_gamma_all(
    n_max: usize,
    e: f64,
    eta: f64,
    phi: &TestFunction,
    mass: f64,
    tol: f64,
) -> Result<Vec<Complex64>> {
    check_energy(e)?;
    if !(eta > 0.0) {
        return Err(invalid("eta must be positive"));
    }
    if phi.kind() == TestKind::Cauchy {
        let mut g = gamma_sequence(n_max, c64(e, eta), mass)?;
        for v in g.iter_mut() {
            *v *= phi.factor();
        }
        return Ok(g);
    }
    let t_max = phi.hat_cutoff(tol) / eta;
    weighted_integral(n_max, e, eta, phi, mass, t_max, tol)
}

/// `γ̃_n`: the smoothed integral truncated at `t = M^{ρ+δ}`.
pub fn gamma_tilde(n: usize, e: f64, params: &ExpansionParams, phi: &TestFunction, mass: f64) -> Result<Complex64> {
    Ok(gamma_tilde_all(n, e, params, phi, mass, 1e-12)?[n])
}

/// `γ̃_n` for `n = 0..=n_max`.
pub fn gamma_tilde_all(
    n_max: usize,
    e: f64,
    params: &ExpansionParams,
    phi: &TestFunction,
    mass: f64,
    tol: f64,
) -> Result<Vec<Complex64>> {
    check_energy(e)?;
    let cut = params.cutoff_time(mass).ok_or_else(|| invalid("gamma_tilde needs delta"))?;
    let t_max = cut.min(phi.hat_cutoff(tol) / params.eta);
    weighted_integral(n_max, e, params.eta, phi, mass, t_max, tol)
}

/// Kapteyn's bound `|J_ν(t)| <= [z e^s / (1 + s)]^ν`, `z = t/ν`, `s = √(1-z²)`,
/// extended by `1` for `t >= ν`.
fn kapteyn(nu: usize, t: f64) -> f64 {
    let nu = nu as f64;
    if t >= nu {
        return 1.0;
    }
    if t <= 0.0 {
        return 0.0;
    }
    let z = t / nu;
    let s = (1.0 - z * z).sqrt();
    (nu * (z.ln() + s - (1.0 + s).ln())).exp()
}

/// Upper bounds `e_n >= |c_n|` for the coefficients returned by
/// [`smoothed_gamma_all`] with the same `tol`, valid for every `n`.
///
/// Stored explicitly up to some order and extended geometrically beyond it.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientEnvelope {
    head: Vec<f64>,
    ratio: f64,
}

impl CoefficientEnvelope {
    /// The bound at order `n`.
    pub fn at(&self, n: usize) -> f64 {
        let last = self.head.len() - 1;
        if n <= last {
            self.head[n]
        } else {
            self.head[last] * self.ratio.powi((n - last).min(i32::MAX as usize) as i32)
        }
    }

    /// `e_{n+1} <= ratio · e_n` for every `n` past the stored head.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Number of explicitly stored orders.
    pub fn stored(&self) -> usize {
        self.head.len()
    }
}

/// Builds a [`CoefficientEnvelope`] covering at least `n_max`.
///
/// Cauchy: `|γ_n(E + iη)|` itself, geometric with ratio `|u|`. Otherwise
/// `|a_n(t)| <= 2 κ_n(t) / (1 - r)` with `κ_n` the Kapteyn bound and
/// `r = 1/(M-1)`, integrated against `|φ̂(ηt)|` on `[0, T]` by an upper
/// Riemann sum that takes `|φ̂|` at the left and `κ_n` at the right end of
/// each cell. Past `2eT` every `κ_n(t)` with `t <= T` shrinks by more than
/// half per order.
pub fn coefficient_envelope(
    n_max: usize,
    e: f64,
    eta: f64,
    phi: &TestFunction,
    mass: f64,
    tol: f64,
) -> Result<CoefficientEnvelope> {
    if phi.kind() == TestKind::Cauchy {
        let z = c64(e, eta);
        let head = gamma_sequence(n_max, z, mass)?.iter().map(|g| g.norm() * phi.factor().abs()).collect();
        return Ok(CoefficientEnvelope { head, ratio: super::gamma::unit_root(z).norm() });
    }
    let r = 1.0 / (mass - 1.0);
    if r >= 1.0 {
        return Err(Error::DegenerateMass { m: mass });
    }
    let lead = 2.0 / (1.0 - r);
    let t_max = phi.hat_cutoff(tol) / eta;
    let h = (0.25 / eta).min(0.25);
    let cells = (t_max / h).ceil() as usize + 1;
    // Running supremum of |φ̂| from the right gives a non-increasing envelope.
    let mut hat: Vec<f64> = (0..=cells).map(|k| phi.fourier(eta * h * k as f64).norm()).collect();
    for k in (0..cells).rev() {
        hat[k] = hat[k].max(hat[k + 1]);
    }
    let mut suffix = vec![0.0; cells + 1];
    for k in (0..cells).rev() {
        suffix[k] = suffix[k + 1] + hat[k];
    }
    let top = n_max.max((2.0 * core::f64::consts::E * h * cells as f64).ceil() as usize + 1);
    let mut head = Vec::with_capacity(top + 1);
    for n in 0..=top {
        // Cells whose right end reaches n have κ_n = 1.
        let first_full = ((n as f64 / h).ceil() as usize).saturating_sub(1).min(cells);
        let mut acc = suffix[first_full];
        let mut k = first_full;
        while k > 0 {
            k -= 1;
            let kap = kapteyn(n, h * (k + 1) as f64);
            acc += hat[k] * kap;
            // κ_n grows with t, so the cells left of k add at most this much.
            let rest = kap * hat[0] * k as f64;
            if rest <= 1e-17 * acc {
                acc += rest;
                break;
            }
        }
        head.push(lead * acc * h);
    }
    Ok(CoefficientEnvelope { head, ratio: 0.5 })
}

/// Like [`coefficient_envelope`] but by adaptive quadrature of the same
/// integrand, which is tighter and cheaper for a handful of orders.
pub fn coefficient_envelope_at(n: usize, eta: f64, phi: &TestFunction, mass: f64, tol: f64) -> Result<f64> {
    let r = 1.0 / (mass - 1.0);
    let lead = 2.0 / (1.0 - r);
    let t_max = phi.hat_cutoff(tol) / eta;
    let cfg = QuadConfig { abs_tol: tol, rel_tol: 1e-6, max_panels: 20_000 };
    let f = |t: f64| phi.fourier(eta * t).norm() * kapteyn(n, t);
    let split = (n as f64).min(t_max);
    let mut v = 0.0;
    if split > 0.0 {
        v += integrate_real(f, 0.0, split, 8, cfg)?.value;
    }
    if t_max > split {
        v += integrate_real(f, split, t_max, 8 + (t_max - split) as usize / 8, cfg)?.value;
    }
    Ok(lead * v)
}
