//! Bound audits over a default family of admissible `α`.

use crate::error::Result;
use mesoband::lattice::{admissible, bound_audit, AuditReport, TorusGeometry, VarianceOperator};
use mesoband::Complex64;

/// `count` points `α = 1 - δ e^{iψ}` with `δ` geometric from twice the
/// admissibility floor up to 1 and `ψ` alternating in `[-π/3, π/3]`.
pub fn default_alphas(op: &VarianceOperator, count: usize) -> Vec<Complex64> {
    let g = op.geometry();
    let ratio = g.width() as f64 / g.side() as f64;
    let floor = 4.0 / g.mass() + ratio * ratio;
    let lo = (2.0 * floor).min(0.5);
    (0..count)
        .map(|k| {
            let s = if count > 1 { k as f64 / (count - 1) as f64 } else { 0.0 };
            let delta = lo * (1.0 / lo).powf(s);
            let psi = if k % 2 == 0 { 1.0 } else { -1.0 } * std::f64::consts::FRAC_PI_3 * s;
            Complex64::new(1.0, 0.0) - Complex64::from_polar(delta, psi)
        })
        .filter(|&a| admissible(op, a))
        .collect()
}

/// Audits `count` default values of `α` on a step profile.
pub fn audit(d: usize, l: usize, w: usize, count: usize) -> Result<AuditReport> {
    let g = TorusGeometry::step(d, l, w)?;
    let op = VarianceOperator::new(&g)?;
    let alphas = default_alphas(&op, count);
    Ok(bound_audit(&op, &alphas)?)
}
