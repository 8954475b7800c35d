use crate::error::{Error, Result};
use crate::kernels::{unit_root, TestFunction, TestKind};
use crate::lattice::{Accumulator, VarianceOperator};
use crate::prelude::*;
use crate::window::Window;

/// The Cauchy-kernel approximation of `V_main` as a trace over modes,
///
/// `2 Re{ 4 u_1/(1 + u_1²) · ū_2/(1 + ū_2²) · Σ_p αλ_p / (1 - αλ_p)² }`,
///
/// with `u_j = e^{i arcsin(E_j + iη)}` and `α = u_1 ū_2`.
/// Both test functions must be Cauchy. `include_zero_mode = false` drops the
/// mode `p = 0`.
pub fn resolvent_trace_form(
    op: &VarianceOperator,
    window: &Window,
    phi1: &TestFunction,
    phi2: &TestFunction,
    include_zero_mode: bool,
) -> Result<f64> {
    if phi1.kind() != TestKind::Cauchy || phi2.kind() != TestKind::Cauchy {
        return Err(Error::InvalidArgument("the resolvent trace form needs Cauchy test functions".into()));
    }
    let u1 = unit_root(c64(window.e1, window.eta));
    let u2 = unit_root(c64(window.e2, window.eta)).conj();
    let one = c64(1.0, 0.0);
    let alpha = u1 * u2;
    let pref = 4.0 * u1 / (one + u1 * u1) * u2 / (one + u2 * u2);
    let (mut re, mut im) = (Accumulator::default(), Accumulator::default());
    let mut singular = false;
    let mut first = true;
    op.for_each_class(|lam, mult| {
        // the zero mode is visited first and is its own class
        if core::mem::take(&mut first) && !include_zero_mode {
            return;
        }
        let z = alpha * lam;
        let den = (one - z) * (one - z);
        if den.norm() == 0.0 {
            singular = true;
            return;
        }
        let v = z / den * mult;
        re.add(v.re);
        im.add(v.im);
    });
    if singular {
        return Err(Error::SingularMode);
    }
    let sum = c64(re.total(), im.total());
    Ok(2.0 * (pref * sum).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TorusGeometry;

    #[test]
    fn matches_direct_mode_sum() {
        let g = TorusGeometry::step(2, 12, 2).unwrap();
        let op = VarianceOperator::new(&g).unwrap();
        let w = Window::new(0.1, 0.3, 0.1, 0.2).unwrap();
        let c = TestFunction::cauchy();
        let u1 = unit_root(c64(0.1, 0.1));
        let u2 = unit_root(c64(0.3, 0.1)).conj();
        let a = u1 * u2;
        let one = c64(1.0, 0.0);
        let sum: Complex64 = op.symbol().iter().map(|&l| a * l / ((one - a * l) * (one - a * l))).sum();
        let want = 2.0 * (4.0 * u1 / (one + u1 * u1) * u2 / (one + u2 * u2) * sum).re;
        let got = resolvent_trace_form(&op, &w, &c, &c, true).unwrap();
        assert!((got - want).abs() < 1e-10 * want.abs());
        let l0 = op.symbol()[0];
        let zero = 2.0 * (4.0 * u1 / (one + u1 * u1) * u2 / (one + u2 * u2) * (a * l0 / ((one - a * l0) * (one - a * l0)))).re;
        let without = resolvent_trace_form(&op, &w, &c, &c, false).unwrap();
        assert!((got - without - zero).abs() < 1e-10 * want.abs());
        assert!(resolvent_trace_form(&op, &w, &c, &TestFunction::gaussian(), true).is_err());
    }
}
