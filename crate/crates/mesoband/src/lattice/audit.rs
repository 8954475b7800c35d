use super::fft::{transform, Direction};
use super::operator::VarianceOperator;
use crate::error::{Error, Result};
use crate::prelude::*;

/// `R₂(s) = 1 + 1{d=1} s^{-1/2} + 1{d=2} |log s|`.
pub fn r2(d: usize, s: f64) -> f64 {
    match d {
        1 => 1.0 + 1.0 / s.sqrt(),
        2 => 1.0 + s.ln().abs(),
        _ => 1.0,
    }
}

/// Measured constants for one value of `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaAudit {
    pub alpha: Complex64,
    /// `‖(1 - αS)^{-1}‖_{∞→∞}`.
    pub inverse_norm: f64,
    /// `inverse_norm · (2 - |1 + α|) / log N`.
    pub inverse_constant: f64,
    /// `max_xy |(S / (1 - αS))_xy|`.
    pub max_entry: f64,
    /// `max_entry · M / R₂(|1 - α|)`.
    pub entry_constant: f64,
}

/// Output of [`bound_audit`].
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub alphas: Vec<AlphaAudit>,
    /// `sup_{1 <= b <= (L/W)²} sup_xy ((S/ℐ)^b)_xy · M · b^{d/2}`.
    pub lclt_constant: f64,
    /// Power `b` at which the local-CLT supremum is attained.
    pub lclt_power: usize,
    /// `1 + min_p λ_p`, the distance of the spectrum from `-1`.
    pub spectral_margin: f64,
    /// `ℐ - max_{p≠0} λ_p`.
    pub spectral_gap: f64,
}

/// Whether `α` is in the range where the resolvent bounds are stated.
pub fn admissible(op: &VarianceOperator, alpha: Complex64) -> bool {
    let g = op.geometry();
    let ratio = g.width() as f64 / g.side() as f64;
    let floor = 4.0 / g.mass() + ratio * ratio;
    alpha.norm() <= 1.0 + 1e-12 && (Complex64::new(1.0, 0.0) - alpha).norm() >= floor * (1.0 - 1e-12)
}

/// Measures the constants in the resolvent and local-CLT bounds.
pub fn bound_audit(op: &VarianceOperator, alphas: &[Complex64]) -> Result<AuditReport> {
    let g = op.geometry();
    for &a in alphas {
        if !admissible(op, a) {
            return Err(Error::AlphaOutOfRange { re: a.re, im: a.im });
        }
    }
    let (d, m, n) = (g.dim(), g.mass(), g.sites());
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let inv = op.circulant_row(|lam| one / (one - alpha * lam));
        let inverse_norm: f64 = inv.iter().map(|z| z.norm()).sum();
        let ent = op.circulant_row(|lam| lam / (one - alpha * lam));
        let max_entry = ent.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        out.push(AlphaAudit {
            alpha,
            inverse_norm,
            inverse_constant: inverse_norm * (2.0 - (one + alpha).norm()) / (n as f64).ln(),
            max_entry,
            entry_constant: max_entry * m / r2(d, (one - alpha).norm()),
        });
    }

    let ratio = g.side() / g.width();
    let b_max = (ratio * ratio).max(1);
    let iota = g.iota();
    let mut power: Vec<f64> = vec![1.0; n];
    let mut grid = vec![Complex64::new(0.0, 0.0); n];
    let (mut lclt_constant, mut lclt_power) = (0.0f64, 1usize);
    for b in 1..=b_max {
        for ((p, lam), z) in power.iter_mut().zip(op.symbol()).zip(grid.iter_mut()) {
            *p *= lam / iota;
            *z = Complex64::new(*p, 0.0);
        }
        transform(&mut grid, d, g.side(), Direction::Inverse);
        let sup = grid.iter().fold(0.0f64, |acc, z| acc.max(z.re)) / n as f64;
        let c = sup * m * (b as f64).powf(d as f64 / 2.0);
        if c > lclt_constant {
            lclt_constant = c;
            lclt_power = b;
        }
    }

    Ok(AuditReport {
        alphas: out,
        lclt_constant,
        lclt_power,
        spectral_margin: 1.0 + op.min_eigenvalue(),
        spectral_gap: iota - op.second_eigenvalue(),
    })
}
