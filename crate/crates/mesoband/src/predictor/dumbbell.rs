use crate::error::{invalid, Error, Result};
use crate::kernels::{coefficient_envelope, smoothed_gamma_all, CoefficientEnvelope, ExpansionParams, TestFunction};
use crate::lattice::{TraceTable, VarianceOperator};
use crate::prelude::*;
use crate::window::Window;

/// Stopping rule for the dumbbell series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationBudget {
    /// Accept once the certified tail is below `rel_tol · |V|`.
    pub rel_tol: f64,
    /// Quadrature tolerance for the coefficients and the `φ̂` cutoff.
    pub coef_tol: f64,
    /// Largest path order the search may reach.
    pub max_order: usize,
    /// Refuse orders `n_1 + n_2` beyond `M^μ` when `μ` is set.
    pub enforce_mu_cap: bool,
}

impl Default for TruncationBudget {
    fn default() -> Self {
        Self { rel_tol: 1e-8, coef_tol: 1e-12, max_order: 100_000, enforce_mu_cap: false }
    }
}

/// The value of the dumbbell series and how it was truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct DumbbellSum {
    /// `V_main` for `β = 2`.
    pub value: f64,
    /// Certified bound on `|V_main - value|`.
    pub tail: f64,
    /// Largest coefficient order used.
    pub order: usize,
    /// `Σ |terms|`, the scale against which rounding is judged.
    pub magnitude: f64,
}

/// Sums the dumbbell series for many windows on one lattice, caching traces.
#[derive(Debug, Clone)]
pub struct DumbbellEngine<'a> {
    op: &'a VarianceOperator,
    table: TraceTable,
}

/// Number of pairs `(b_3, b_4)` with `b_3 >= 1`, `b_4 >= 0`, `b_3 + b_4 = m`,
/// excluding `(2, 0)` and `(1, 1)`.
fn multiplicity(m: usize) -> f64 {
    match m {
        0 | 2 => 0.0,
        _ => m as f64,
    }
}

/// `G(m) = Σ_b 2 Re c_{2b+m} ℐ^b` over `2b + m <= n` for `m = 0..=n`.
fn fold_series(c: &[Complex64], iota: f64) -> Vec<f64> {
    let n = c.len() - 1;
    let mut g = vec![0.0; n + 3];
    for m in (0..=n).rev() {
        g[m] = 2.0 * c[m].re + iota * g[m + 2];
    }
    g.truncate(n + 1);
    g
}

/// `Σ_b 2 e_{2b+m} ℐ^b` for all `b` and, separately, for `2b + m > n`.
struct Majorant {
    full: Vec<f64>,
    beyond: Vec<f64>,
    /// Geometric ratio per unit of `m` past the stored range.
    ratio: f64,
}

impl Majorant {
    fn new(env: &CoefficientEnvelope, n: usize, span: usize, iota: f64) -> Result<Self> {
        let rho = env.ratio();
        let q = rho * rho * iota;
        if !(q < 1.0) {
            return Err(Error::Truncation { tail: f64::INFINITY });
        }
        let span = span.max(n).max(env.stored());
        // Past `span` the envelope is geometric: Σ_b 2 e_span ρ^{m+2b-span} ℐ^b.
        let closed = |m: usize| 2.0 * env.at(m) / (1.0 - q);
        let mut full = vec![0.0; span + 1];
        let mut beyond = vec![0.0; span + 1];
        full[span] = closed(span);
        if span >= 1 {
            full[span - 1] = closed(span - 1);
        }
        for m in (0..span.saturating_sub(1)).rev() {
            full[m] = 2.0 * env.at(m) + iota * full[m + 2];
        }
        for m in (0..=span).rev() {
            beyond[m] = if m > n {
                full[m]
            } else if m + 2 <= span {
                iota * beyond[m + 2]
            } else {
                iota * closed(m + 2)
            };
        }
        Ok(Self { full, beyond, ratio: rho })
    }
}

impl<'a> DumbbellEngine<'a> {
    pub fn new(op: &'a VarianceOperator) -> Self {
        Self { op, table: op.trace_table(64) }
    }

    pub fn operator(&self) -> &VarianceOperator {
        self.op
    }

    fn ensure_traces(&mut self, n: usize) {
        if self.table.max_power() < n {
            self.table = self.op.trace_table(n.max(self.table.max_power() * 3 / 2));
        }
    }

    /// `Σ_p |λ_p|^m`, extended past the table by `|λ_p| <= ℐ`.
    fn abs_trace(&self, m: usize, iota: f64) -> f64 {
        let top = self.table.max_power();
        if m <= top {
            self.table.abs_traces[m]
        } else {
            self.table.abs_traces[top] * iota.powi((m - top) as i32)
        }
    }

    /// `V_main` with the coefficient series truncated at order `n`, and a
    /// certified bound on what the truncation drops.
    #[allow(clippy::too_many_arguments)]
    fn at_order(
        &mut self,
        n: usize,
        window: &Window,
        phi1: &TestFunction,
        phi2: &TestFunction,
        env1: &CoefficientEnvelope,
        env2: &CoefficientEnvelope,
        coef_tol: f64,
    ) -> Result<DumbbellSum> {
        let g = self.op.geometry();
        let (mass, iota) = (g.mass(), g.iota());
        self.ensure_traces(n);
        let c1 = smoothed_gamma_all(n, window.e1, window.eta, phi1, mass, coef_tol)?;
        let c2 = smoothed_gamma_all(n, window.e2, window.eta, phi2, mass, coef_tol)?;
        let (g1, g2) = (fold_series(&c1, iota), fold_series(&c2, iota));
        let (mut value, mut magnitude) = (0.0, 0.0);
        for m in 1..=n {
            let t = multiplicity(m) * g1[m] * g2[m] * self.table.traces[m];
            value += t;
            magnitude += t.abs();
        }

        let span = n.max(env1.stored()).max(env2.stored());
        let maj1 = Majorant::new(env1, n, span, iota)?;
        let maj2 = Majorant::new(env2, n, span, iota)?;
        let mut tail = 0.0;
        for m in 1..=span {
            let w = multiplicity(m) * self.abs_trace(m, iota);
            tail += w * (maj1.beyond[m] * maj2.full[m] + maj1.full[m] * maj2.beyond[m]);
        }
        // Past `span` the summand is at most m T_m Ẽ_1 Ẽ_2, geometric in m.
        let q = maj1.ratio * maj2.ratio * iota;
        if !(q < 1.0) {
            return Err(Error::Truncation { tail: f64::INFINITY });
        }
        let last = self.abs_trace(span, iota) * maj1.full[span] * maj2.full[span];
        let s = span as f64;
        tail += last * q * ((s + 1.0) - s * q) / ((1.0 - q) * (1.0 - q));
        tail += 1e-13 * magnitude;
        Ok(DumbbellSum { value, tail, order: n, magnitude })
    }

    /// `V_main` for `β = 2`, growing the coefficient order until the
    /// certified tail meets `budget`.
    pub fn evaluate(
        &mut self,
        window: &Window,
        phi1: &TestFunction,
        phi2: &TestFunction,
        params: &ExpansionParams,
        budget: &TruncationBudget,
    ) -> Result<DumbbellSum> {
        let g = self.op.geometry();
        let mass = g.mass();
        if (params.eta - window.eta).abs() > 1e-12 * window.eta {
            return Err(invalid(alloc::format!("params eta {} differs from window eta {}", params.eta, window.eta)));
        }
        let cap = if budget.enforce_mu_cap {
            params.path_cap(mass).map(|c| (c / 2.0).floor() as usize)
        } else {
            None
        };
        let limit = cap.map_or(budget.max_order, |c| c.min(budget.max_order));
        let mut n = ((8.0 / window.eta).ceil() as usize + 16).min(limit);
        loop {
            let env1 = coefficient_envelope(n, window.e1, window.eta, phi1, mass, budget.coef_tol)?;
            let env2 = coefficient_envelope(n, window.e2, window.eta, phi2, mass, budget.coef_tol)?;
            let sum = self.at_order(n, window, phi1, phi2, &env1, &env2, budget.coef_tol)?;
            if sum.tail <= budget.rel_tol * sum.value.abs() {
                return Ok(sum);
            }
            if n >= limit {
                return Err(Error::Truncation { tail: sum.tail });
            }
            n = (n * 3 / 2 + 8).min(limit);
        }
    }
}

/// `V_main` for `β = 2` on a single window; see [`DumbbellEngine`].
pub fn v_main(
    op: &VarianceOperator,
    window: &Window,
    phi1: &TestFunction,
    phi2: &TestFunction,
    params: &ExpansionParams,
    budget: &TruncationBudget,
) -> Result<DumbbellSum> {
    DumbbellEngine::new(op).evaluate(window, phi1, phi2, params, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::gamma_sequence;
    use crate::lattice::TorusGeometry;

    #[test]
    fn multiplicities() {
        let got: Vec<f64> = (0..6).map(multiplicity).collect();
        assert_eq!(got, vec![0.0, 1.0, 0.0, 3.0, 4.0, 5.0]);
        // brute count over the admissible pairs
        for m in 1..12usize {
            let count = (1..=m).filter(|&b3| !matches!((b3, m - b3), (2, 0) | (1, 1))).count();
            assert_eq!(count as f64, multiplicity(m));
        }
    }

    /// Direct quadruple sum over `(b_1, b_2, b_3, b_4)` with `n_i <= n`.
    fn brute(c1: &[Complex64], c2: &[Complex64], iota: f64, tr: &[f64]) -> f64 {
        let n = c1.len() - 1;
        let mut acc = 0.0;
        for b3 in 1..=n {
            for b4 in 0..=n - b3 {
                if matches!((b3, b4), (2, 0) | (1, 1)) {
                    continue;
                }
                let m = b3 + b4;
                for b1 in 0..=(n - m) / 2 {
                    for b2 in 0..=(n - m) / 2 {
                        acc += 2.0 * c1[2 * b1 + m].re
                            * 2.0
                            * c2[2 * b2 + m].re
                            * iota.powi((b1 + b2) as i32)
                            * tr[m];
                    }
                }
            }
        }
        acc
    }

    #[test]
    fn folded_sum_matches_quadruple_sum() {
        let g = TorusGeometry::step(1, 60, 3).unwrap();
        let op = VarianceOperator::new(&g).unwrap();
        let n = 14;
        let table = op.trace_table(n);
        let c1 = gamma_sequence(n, c64(0.2, 0.3), g.mass()).unwrap();
        let c2 = gamma_sequence(n, c64(0.35, 0.3), g.mass()).unwrap();
        let want = brute(&c1, &c2, g.iota(), &table.traces);
        let (g1, g2) = (fold_series(&c1, g.iota()), fold_series(&c2, g.iota()));
        let got: f64 = (1..=n).map(|m| multiplicity(m) * g1[m] * g2[m] * table.traces[m]).sum();
        assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "{got} vs {want}");
    }

    /// For the Cauchy kernel `G(m) = 2 Re[P (-iu)^m]` with
    /// `P = 2u / ((1 + r u²)(1 + ℐ u²))`, so the series is a mode sum of
    /// `h(z) = Σ_m mult(m) z^m = z/(1-z)² - 2z²`.
    fn cauchy_mode_sum(op: &VarianceOperator, w: &Window) -> f64 {
        let g = op.geometry();
        let (r, iota) = (1.0 / (g.mass() - 1.0), g.iota());
        let one = c64(1.0, 0.0);
        let parts = |e: f64| {
            let u = crate::kernels::unit_root(c64(e, w.eta));
            let p = 2.0 * u / ((one + r * u * u) * (one + iota * u * u));
            (p, c64(0.0, -1.0) * u)
        };
        let (p1, w1) = parts(w.e1);
        let (p2, w2) = parts(w.e2);
        let h = |z: Complex64| z / ((one - z) * (one - z)) - 2.0 * z * z;
        op.symbol()
            .iter()
            .map(|&lam| 2.0 * (p1 * p2.conj() * h(w1 * w2.conj() * lam) + p1 * p2 * h(w1 * w2 * lam)).re)
            .sum()
    }

    #[test]
    fn cauchy_matches_mode_sum() {
        for (d, l, wd, e1, e2, eta) in [(1, 3000, 40, 0.1, 0.1, 0.1), (1, 3000, 40, -0.2, 0.15, 0.08), (2, 90, 6, 0.3, 0.35, 0.2)] {
            let g = TorusGeometry::step(d, l, wd).unwrap();
            let op = VarianceOperator::new(&g).unwrap();
            let w = Window::new(e1, e2, eta, 0.2).unwrap();
            let params = ExpansionParams::from_eta(eta, g.mass()).unwrap();
            let phi = TestFunction::cauchy();
            let s = v_main(&op, &w, &phi, &phi, &params, &TruncationBudget::default()).unwrap();
            let want = cauchy_mode_sum(&op, &w);
            assert!((s.value - want).abs() < 1e-7 * want.abs(), "d={d}: {} vs {want}", s.value);
        }
    }

    #[test]
    fn tail_bound_is_honest() {
        let g = TorusGeometry::step(1, 200, 8).unwrap();
        let op = VarianceOperator::new(&g).unwrap();
        let w = Window::new(0.1, 0.2, 0.25, 0.2).unwrap();
        let phi = TestFunction::cauchy();
        let mut eng = DumbbellEngine::new(&op);
        let env = coefficient_envelope(400, w.e1, w.eta, &phi, g.mass(), 1e-12).unwrap();
        let env2 = coefficient_envelope(400, w.e2, w.eta, &phi, g.mass(), 1e-12).unwrap();
        let reference = eng.at_order(400, &w, &phi, &phi, &env, &env2, 1e-12).unwrap();
        for n in [10, 20, 40] {
            let e1 = coefficient_envelope(n, w.e1, w.eta, &phi, g.mass(), 1e-12).unwrap();
            let e2 = coefficient_envelope(n, w.e2, w.eta, &phi, g.mass(), 1e-12).unwrap();
            let s = eng.at_order(n, &w, &phi, &phi, &e1, &e2, 1e-12).unwrap();
            assert!((s.value - reference.value).abs() <= s.tail, "n={n}");
        }
    }

    #[test]
    fn converges_under_budget() {
        let g = TorusGeometry::step(1, 400, 10).unwrap();
        let op = VarianceOperator::new(&g).unwrap();
        let w = Window::new(0.0, 0.05, 0.2, 0.2).unwrap();
        let params = ExpansionParams::from_eta(0.2, g.mass()).unwrap();
        let s = v_main(&op, &w, &TestFunction::gaussian(), &TestFunction::gaussian(), &params, &TruncationBudget::default())
            .unwrap();
        assert!(s.tail <= 1e-8 * s.value.abs());
        assert!(s.value.is_finite() && s.value != 0.0);
    }

    #[test]
    fn mu_cap_is_a_guard() {
        let g = TorusGeometry::step(1, 4000, 200).unwrap();
        let op = VarianceOperator::new(&g).unwrap();
        let w = Window::diagonal(0.0, 0.2, 0.2).unwrap();
        let params = ExpansionParams::from_eta(0.2, g.mass()).unwrap();
        let budget = TruncationBudget { enforce_mu_cap: true, ..TruncationBudget::default() };
        let phi = TestFunction::cauchy();
        assert!(matches!(v_main(&op, &w, &phi, &phi, &params, &budget), Err(Error::Truncation { .. })));
    }
}
