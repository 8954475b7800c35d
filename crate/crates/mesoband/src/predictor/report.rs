use super::constants::nu;
use super::dumbbell::{DumbbellEngine, DumbbellSum, TruncationBudget};
use super::poisson::poisson_baseline;
use super::resolvent::resolvent_trace_form;
use super::theta::{theta_asymptotic, theta_from_v, wigner_theta, Form, ThetaForms, ThetaInputs};
use crate::ensemble::Beta;
use crate::error::Result;
use crate::kernels::{ExpansionParams, TestFunction, TestKind};
use crate::lattice::MomentTensors;
use crate::prelude::*;
use crate::quad::{integrate_real, QuadConfig};
use crate::window::Window;

/// `∫ φ^η(x - E) ν(x) dx` against the semicircle density.
pub fn expected_density(phi: &TestFunction, e: f64, eta: f64) -> Result<f64> {
    let cfg = QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_panels: 200_000 };
    let panels = ((2.0 / eta).ceil() as usize).clamp(16, 50_000);
    // x = sin θ removes the square-root endpoints
    let f = |th: f64| {
        let (s, c) = th.sin_cos();
        phi.rescaled(s - e, eta) * (2.0 / PI) * c * c
    };
    Ok(integrate_real(f, -PI / 2.0, PI / 2.0, panels, cfg)?.value)
}

/// Inputs to [`predict`].
#[derive(Debug, Clone, Copy)]
pub struct PredictionRequest<'a> {
    pub beta: Beta,
    pub window: &'a Window,
    pub phi1: &'a TestFunction,
    pub phi2: &'a TestFunction,
    pub params: &'a ExpansionParams,
    pub budget: &'a TruncationBudget,
    pub moments: &'a MomentTensors,
    /// Gate exponent for the large-`ω` asymptotics.
    pub tau: f64,
}

/// All predictions for one window.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    pub window: Window,
    pub beta: Beta,
    pub dim: usize,
    pub sites: usize,
    pub mass: f64,
    pub rho: f64,
    /// `2πν(E_j)φ̂_j(0)`, the leading expected densities.
    pub ey_leading: (f64, f64),
    /// Semicircle-smoothed expected densities.
    pub ey: (f64, f64),
    /// The dumbbell sum (β = 2 normalisation).
    pub v_main: DumbbellSum,
    /// `Cov(Y_1, Y_2) / (EY_1 EY_2)` from `V_main`.
    pub ratio: f64,
    /// `Θ` from `V_main`.
    pub theta: f64,
    /// Closed-form regime matching the window, if any.
    pub form: Option<Form>,
    pub asymptotic: Option<ThetaForms>,
    pub wigner: Option<f64>,
    /// Cauchy-kernel trace form of `V_main` (β = 2), for Cauchy pairs.
    pub resolvent: Option<f64>,
    /// Normalised Poisson covariance.
    pub poisson: f64,
}

/// The regime a window falls in, if either closed form applies.
pub fn infer_form(window: &Window, mass: f64, tau: f64) -> Option<Form> {
    if window.omega == 0.0 {
        Some(Form::OmegaZero)
    } else if window.eta <= mass.powf(-tau) * window.omega {
        Some(Form::OmegaLarge)
    } else {
        None
    }
}

/// Evaluates every prediction for one window.
pub fn predict(engine: &mut DumbbellEngine<'_>, req: &PredictionRequest<'_>) -> Result<PredictionReport> {
    let geometry = engine.operator().geometry().clone();
    let w = req.window;
    let v = engine.evaluate(w, req.phi1, req.phi2, req.params, req.budget)?;
    let ey = (expected_density(req.phi1, w.e1, w.eta)?, expected_density(req.phi2, w.e2, w.eta)?);
    let ey_leading = (
        2.0 * PI * nu(w.e1) * req.phi1.fourier(0.0).re,
        2.0 * PI * nu(w.e2) * req.phi2.fourier(0.0).re,
    );
    let n = geometry.sites() as f64;
    let ratio = 2.0 / req.beta.as_f64() * v.value / (n * n * ey.0 * ey.1);
    let theta = theta_from_v(v.value, &geometry, req.beta, ey.0, ey.1);
    let form = infer_form(w, geometry.mass(), req.tau);
    let inputs = ThetaInputs {
        dim: geometry.dim(),
        beta: req.beta,
        window: w,
        phi1: req.phi1,
        phi2: req.phi2,
        moments: req.moments,
        mass: geometry.mass(),
        tau: req.tau,
    };
    let asymptotic = form.and_then(|f| theta_asymptotic(&inputs, f).ok());
    let wigner = form.and_then(|f| wigner_theta(req.beta, w, req.phi1, req.phi2, f).ok());
    let cauchy = req.phi1.kind() == TestKind::Cauchy && req.phi2.kind() == TestKind::Cauchy;
    let resolvent = if cauchy { Some(resolvent_trace_form(engine.operator(), w, req.phi1, req.phi2, true)?) } else { None };
    let poisson = poisson_baseline(geometry.sites(), req.phi1, req.phi2, w.eta, w.omega)?;
    Ok(PredictionReport {
        window: *w,
        beta: req.beta,
        dim: geometry.dim(),
        sites: geometry.sites(),
        mass: geometry.mass(),
        rho: req.params.rho,
        ey_leading,
        ey,
        v_main: v,
        ratio,
        theta,
        form,
        asymptotic,
        wigner,
        resolvent,
        poisson,
    })
}
