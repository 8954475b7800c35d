use mesoband::ensemble::Beta;
use mesoband::kernels::{ExpansionParams, TestFunction};
use mesoband::lattice::{MomentTensors, TorusGeometry, VarianceOperator};
use mesoband::predictor::{
    nu, resolvent_trace_form, theta_asymptotic, v_main, DumbbellEngine, Form, ThetaInputs, TruncationBudget,
};
use mesoband::window::Window;
use proptest::prelude::*;
use std::f64::consts::PI;

fn inputs<'a>(
    d: usize,
    beta: Beta,
    w: &'a Window,
    phi: &'a TestFunction,
    m: &'a MomentTensors,
) -> ThetaInputs<'a> {
    ThetaInputs { dim: d, beta, window: w, phi1: phi, phi2: phi, moments: m, mass: 1e6, tau: 0.05 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parameterisations_agree(d in prop_oneof![Just(1usize), Just(3)], real in any::<bool>(),
                               e in -0.8f64..0.8, eta in 0.001f64..0.05, spread in 2.0f64..20.0, zero in any::<bool>()) {
        let beta = if real { Beta::Real } else { Beta::Complex };
        let m = MomentTensors::step_limit(d);
        let phi = TestFunction::cauchy();
        let (w, form) = if zero {
            (Window::diagonal(e, eta, 0.05).unwrap(), Form::OmegaZero)
        } else {
            (Window::centred(e, (spread * eta).min(0.1), eta * 0.5, 0.05).unwrap(), Form::OmegaLarge)
        };
        let t = theta_asymptotic(&inputs(d, beta, &w, &phi, &m), form).unwrap();
        prop_assert!((t.general_at_step - t.step).abs() <= 1e-10 * t.step.abs());
    }

    #[test]
    fn large_omega_slope_is_exact(omega in 0.01f64..0.1) {
        let m = MomentTensors::step_limit(1);
        let phi = TestFunction::gaussian();
        let theta = |om: f64| {
            let w = Window::centred(0.0, om, 1e-4, 0.05).unwrap();
            theta_asymptotic(&inputs(1, Beta::Complex, &w, &phi, &m), Form::OmegaLarge).unwrap().step
        };
        let slope = (theta(2.0 * omega) / theta(omega)).abs().ln() / 2f64.ln();
        prop_assert!((slope + 1.5).abs() < 1e-6);
    }
}

#[test]
fn v_main_exchange_symmetry() {
    let g = TorusGeometry::step(1, 400, 20).unwrap();
    let op = VarianceOperator::new(&g).unwrap();
    let (c, gs) = (TestFunction::cauchy(), TestFunction::gaussian());
    let p = ExpansionParams::from_eta(0.15, g.mass()).unwrap();
    let budget = TruncationBudget::default();
    let a = v_main(&op, &Window::new(-0.1, 0.2, 0.15, 0.1).unwrap(), &c, &gs, &p, &budget).unwrap();
    let w = Window::new(-0.1, 0.2, 0.15, 0.1).unwrap();
    let reversed = Window { e1: w.e2, e2: w.e1, omega: -w.omega, ..w };
    let b = v_main(&op, &reversed, &gs, &c, &p, &budget).unwrap();
    assert!((a.value - b.value).abs() <= 1e-12 * a.magnitude);
}

/// Least-squares fit of `y` on `ω^{d/2-2}`, `|log ω|` and `1`.
fn fit(d: usize, rows: &[(f64, f64)]) -> [f64; 3] {
    let basis = |om: f64| [om.powf(d as f64 / 2.0 - 2.0), om.ln().abs(), 1.0];
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for &(om, y) in rows {
        let f = basis(om);
        for i in 0..3 {
            b[i] += f[i] * y;
            for j in 0..3 {
                a[i][j] += f[i] * f[j];
            }
        }
    }
    // Gaussian elimination on the 3×3 normal equations.
    for k in 0..3 {
        for i in k + 1..3 {
            let r = a[i][k] / a[k][k];
            for j in k..3 {
                a[i][j] -= r * a[k][j];
            }
            b[i] -= r * b[k];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        x[i] = (b[i] - (i + 1..3).map(|j| a[i][j] * x[j]).sum::<f64>()) / a[i][i];
    }
    x
}

/// `V_main` divided by the dimension-dependent prefactor of its large-`ω`
/// power law, so that the leading coefficient is comparable across `d`.
fn normalised_rows(d: usize, l: usize, w: usize, eta: f64, omegas: &[f64]) -> Vec<(f64, f64)> {
    let g = TorusGeometry::step(d, l, w).unwrap();
    let op = VarianceOperator::new(&g).unwrap();
    let sd = MomentTensors::new(&g).unwrap().sqrt_det();
    let mut engine = DumbbellEngine::new(&op);
    let phi = TestFunction::gaussian();
    let p = ExpansionParams::from_eta(eta, g.mass()).unwrap();
    let (df, n0) = (d as f64, nu(0.0));
    let norm = (l as f64 / (2.0 * PI * w as f64)).powi(d as i32) * (2.0 / PI).powf(df / 2.0) / (n0 * n0 * sd)
        * n0.powf(2.0 - df / 2.0);
    omegas
        .iter()
        .map(|&om| {
            let win = Window::centred(0.0, om, eta, 0.1).unwrap();
            (om, engine.evaluate(&win, &phi, &phi, &p, &TruncationBudget::default()).unwrap().value / norm)
        })
        .collect()
}

#[test]
fn power_law_cancels_in_two_dimensions() {
    let omegas = [0.04, 0.06, 0.08, 0.12, 0.16, 0.24, 0.32];
    let c1 = fit(1, &normalised_rows(1, 12800, 200, 0.005, &omegas));
    let c2 = fit(2, &normalised_rows(2, 768, 16, 0.005, &omegas));
    let c3 = fit(3, &normalised_rows(3, 40, 5, 0.005, &omegas));
    assert!((c1[0] / (-PI / 2f64.sqrt()) - 1.0).abs() < 0.3, "{c1:?}");
    assert!((c3[0] / (2f64.sqrt() * PI * PI) - 1.0).abs() < 0.1, "{c3:?}");
    assert!(c2[0].abs() < 0.2 * c1[0].abs().min(c3[0].abs()), "{c2:?}");
    assert!(c2[1] < 0.0, "{c2:?}");
}

#[test]
fn resolvent_gap_saturates_in_mass_and_closes_with_eta() {
    let phi = TestFunction::cauchy();
    let gap = |w: usize, eta: f64| {
        let g = TorusGeometry::step(1, 16 * w, w).unwrap();
        let op = VarianceOperator::new(&g).unwrap();
        let win = Window::diagonal(0.0, eta, 0.1).unwrap();
        let p = ExpansionParams::from_eta(eta, g.mass()).unwrap();
        let v = v_main(&op, &win, &phi, &phi, &p, &TruncationBudget::default()).unwrap().value;
        resolvent_trace_form(&op, &win, &phi, &phi, true).unwrap() / v - 1.0
    };
    let (a, b) = (gap(500, 0.1), gap(5000, 0.1));
    assert!((a - b).abs() < 0.01 && b > 0.1, "{a} {b}");
    let c = gap(5000, 0.05);
    assert!(c < 0.5 * b, "{c} {b}");
}
