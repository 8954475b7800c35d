use super::constants::{k_constant, nu, v_d_form};
use crate::ensemble::Beta;
use crate::error::{invalid, Error, Result};
use crate::kernels::{DecayClass, TestFunction};
use crate::lattice::{MomentTensors, TorusGeometry};
use crate::prelude::*;
use crate::window::Window;

/// Which asymptotic regime to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// `E_1 = E_2`.
    OmegaZero,
    /// `η <= M^{-τ} ω`.
    OmegaLarge,
}

/// Everything the closed forms depend on.
#[derive(Debug, Clone, Copy)]
pub struct ThetaInputs<'a> {
    pub dim: usize,
    pub beta: Beta,
    pub window: &'a Window,
    pub phi1: &'a TestFunction,
    pub phi2: &'a TestFunction,
    pub moments: &'a MomentTensors,
    pub mass: f64,
    /// Gate exponent for [`Form::OmegaLarge`].
    pub tau: f64,
}

/// The asymptotic `Θ` from the general-profile and step-profile formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaForms {
    /// General profile, with the supplied `D` and `Q`.
    pub general: f64,
    /// Step profile, with `D₀` and `Q₀`.
    pub step: f64,
    /// The general formula evaluated at `D₀`, `Q₀`.
    pub general_at_step: f64,
    /// Whether `general_at_step` and `step` agree; `None` where the two
    /// formulas are known to differ.
    pub consistent: Option<bool>,
}

/// `Θ = (2/β) (LW)^d / N² · V / (EY_1 EY_2)`.
pub fn theta_from_v(v_main: f64, geometry: &TorusGeometry, beta: Beta, ey1: f64, ey2: f64) -> f64 {
    let (d, l, w) = (geometry.dim() as i32, geometry.side() as f64, geometry.width() as f64);
    let n = geometry.sites() as f64;
    2.0 / beta.as_f64() * (l * w).powi(d) / (n * n) * v_main / (ey1 * ey2)
}

/// `Cov(Y_1, Y_2) / (EY_1 EY_2)` implied by `V_main`.
pub fn normalized_covariance(v_main: f64, geometry: &TorusGeometry, beta: Beta, ey1: f64, ey2: f64) -> f64 {
    let n = geometry.sites() as f64;
    2.0 / beta.as_f64() * v_main / (n * n * ey1 * ey2)
}

/// `V_main` from the general-profile asymptotics, with the factor
/// `(L / 2πW)^d` removed.
fn v_general(inp: &ThetaInputs<'_>, form: Form, moments: &MomentTensors) -> Result<f64> {
    let d = inp.dim;
    let df = d as f64;
    let w = inp.window;
    let nu = nu(w.e);
    let sd = moments.sqrt_det();
    match (form, d) {
        (Form::OmegaZero, 1..=3) => {
            let v = v_d_form(d, inp.phi1, inp.phi2)?;
            Ok(2f64.powf(df / 2.0) / (nu * nu * sd) * (w.eta / nu).powf(df / 2.0 - 2.0) * v)
        }
        (Form::OmegaZero, 4) => {
            let v = v_d_form(4, inp.phi1, inp.phi2)?;
            Ok(4.0 / (nu * nu * sd) * v * w.eta.ln().abs())
        }
        (Form::OmegaLarge, 1 | 3) => {
            let k = k_constant(d)?;
            Ok((2.0 / PI).powf(df / 2.0) / (nu * nu * sd) * (w.omega / nu).powf(df / 2.0 - 2.0) * k)
        }
        (Form::OmegaLarge, 2) => {
            let q = moments.q()?;
            let log = w.omega.ln().abs();
            let mut bracket = (q - 1.0) * log;
            if pole_term(inp) {
                bracket += PI * w.eta * nu / (w.omega * w.omega + 4.0 * w.eta * w.eta);
            }
            Ok(8.0 / (PI * nu * nu * sd) * bracket)
        }
        (Form::OmegaLarge, 4) => Ok(8.0 / (nu * nu * sd) * w.omega.ln().abs()),
        _ => Err(Error::UnsupportedDimension { d }),
    }
}

/// Whether both functions are Cauchy-class, which keeps the pole term.
fn pole_term(inp: &ThetaInputs<'_>) -> bool {
    inp.phi1.decay_class() == DecayClass::C1 && inp.phi2.decay_class() == DecayClass::C1
}

/// `Θ` from the step-profile formulas.
fn theta_step(inp: &ThetaInputs<'_>, form: Form) -> Result<f64> {
    let d = inp.dim;
    let df = d as f64;
    let w = inp.window;
    let beta = inp.beta.as_f64();
    let nu = nu(w.e);
    let nu4 = nu.powi(4);
    match (form, d) {
        (Form::OmegaZero, 1..=3) => {
            let v = v_d_form(d, inp.phi1, inp.phi2)?;
            Ok((df + 2.0).powf(df / 2.0) / (2.0 * beta * PI.powf(2.0 + df) * nu4) * (w.eta / nu).powf(df / 2.0 - 2.0) * v)
        }
        (Form::OmegaZero, 4) => {
            let v = v_d_form(4, inp.phi1, inp.phi2)?;
            Ok(36.0 / (beta * PI.powi(6) * nu4) * v * w.eta.ln().abs())
        }
        (Form::OmegaLarge, 1 | 3) => {
            let k = k_constant(d)?;
            Ok((df + 2.0).powf(df / 2.0) / (2.0 * beta * PI.powf(2.0 + 1.5 * df) * nu4)
                * (w.omega / nu).powf(df / 2.0 - 2.0)
                * k)
        }
        (Form::OmegaLarge, 2) => {
            let mut bracket = -w.omega.ln().abs() / 3.0;
            if pole_term(inp) {
                bracket += PI * nu * w.eta / (w.omega * w.omega + 4.0 * w.eta * w.eta);
            }
            Ok(8.0 / (beta * PI.powi(5) * nu4) * bracket)
        }
        (Form::OmegaLarge, 4) => Ok(36.0 / (beta * PI.powi(6) * nu4) * w.omega.ln().abs()),
        _ => Err(Error::UnsupportedDimension { d }),
    }
}

/// `(2/β) (2π)^{-d} V / (2πν)²` with `V` stripped of `(L / 2πW)^d`.
fn to_theta(v: f64, inp: &ThetaInputs<'_>) -> f64 {
    let ey = 2.0 * PI * nu(inp.window.e);
    2.0 / inp.beta.as_f64() * (2.0 * PI).powi(-(inp.dim as i32)) * v / (ey * ey)
}

fn check_form(inp: &ThetaInputs<'_>, form: Form) -> Result<()> {
    let w = inp.window;
    if inp.moments.dim != inp.dim {
        return Err(invalid("moment tensor dimension differs from d"));
    }
    match form {
        Form::OmegaZero if w.omega != 0.0 => {
            Err(Error::FormMismatch(alloc::format!("OmegaZero needs E1 = E2, got omega = {}", w.omega)))
        }
        Form::OmegaLarge if w.omega <= 0.0 => Err(Error::FormMismatch("OmegaLarge needs omega > 0".into())),
        Form::OmegaLarge if w.eta > inp.mass.powf(-inp.tau) * w.omega => Err(Error::FormMismatch(alloc::format!(
            "OmegaLarge needs eta <= M^-tau omega: eta = {}, M^-tau omega = {}",
            w.eta,
            inp.mass.powf(-inp.tau) * w.omega
        ))),
        _ => Ok(()),
    }
}

/// Leading-order `Θ` in the requested regime, from both parameterisations.
pub fn theta_asymptotic(inp: &ThetaInputs<'_>, form: Form) -> Result<ThetaForms> {
    check_form(inp, form)?;
    let general = to_theta(v_general(inp, form, inp.moments)?, inp);
    let step_moments = MomentTensors::step_limit(inp.dim);
    let general_at_step = to_theta(v_general(inp, form, &step_moments)?, inp);
    let step = theta_step(inp, form)?;
    let consistent = if form == Form::OmegaZero && inp.dim == 4 {
        None
    } else {
        Some((general_at_step - step).abs() <= 1e-9 * step.abs().max(1e-300))
    };
    Ok(ThetaForms { general, step, general_at_step, consistent })
}

/// GUE/GOE limit of `Θ`: `-4/(βπ⁴ν⁴ω²)` for `ω > 0`, `2V₀/(βπ⁴ν⁴η²)` at
/// `ω = 0`.
pub fn wigner_theta(beta: Beta, window: &Window, phi1: &TestFunction, phi2: &TestFunction, form: Form) -> Result<f64> {
    let nu4 = nu(window.e).powi(4);
    let b = beta.as_f64();
    match form {
        Form::OmegaLarge if window.omega > 0.0 => Ok(-4.0 / (b * PI.powi(4) * nu4 * window.omega * window.omega)),
        Form::OmegaZero if window.omega == 0.0 => {
            let v0 = v_d_form(0, phi1, phi2)?;
            Ok(2.0 * v0 / (b * PI.powi(4) * nu4 * window.eta * window.eta))
        }
        _ => Err(Error::FormMismatch("form does not match omega".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs<'a>(
        d: usize,
        w: &'a Window,
        phi: &'a TestFunction,
        m: &'a MomentTensors,
        beta: Beta,
    ) -> ThetaInputs<'a> {
        ThetaInputs { dim: d, beta, window: w, phi1: phi, phi2: phi, moments: m, mass: 1e6, tau: 0.1 }
    }

    #[test]
    fn parameterisations_agree() {
        let cauchy = TestFunction::cauchy();
        let gauss = TestFunction::gaussian();
        let zero = Window::diagonal(0.2, 0.01, 0.1).unwrap();
        let large = Window::centred(0.1, 0.2, 0.001, 0.1).unwrap();
        for beta in [Beta::Real, Beta::Complex] {
            for d in 1..=4 {
                let m = MomentTensors::step_limit(d);
                for phi in [&cauchy, &gauss] {
                    for (w, form) in [(&zero, Form::OmegaZero), (&large, Form::OmegaLarge)] {
                        let t = theta_asymptotic(&inputs(d, w, phi, &m, beta), form).unwrap();
                        if d == 4 && form == Form::OmegaZero {
                            assert_eq!(t.consistent, None);
                            assert!((t.step / t.general_at_step - 2.0).abs() < 1e-12);
                        } else {
                            assert_eq!(t.consistent, Some(true), "d={d} {form:?}");
                        }
                        assert_eq!(t.general, t.general_at_step);
                    }
                }
            }
        }
    }

    #[test]
    fn reference_values() {
        // d = 1, β = 2, E = 0, Cauchy: Θ = 3^{1/2}/(4π³ν⁴) (η/ν)^{-3/2} V_1
        let phi = TestFunction::cauchy();
        let w = Window::diagonal(0.0, 0.01, 0.1).unwrap();
        let m = MomentTensors::step_limit(1);
        let t = theta_asymptotic(&inputs(1, &w, &phi, &m, Beta::Complex), Form::OmegaZero).unwrap();
        let nu = 2.0 / PI;
        let want = 3f64.sqrt() / (4.0 * PI.powi(3) * nu.powi(4)) * (0.01 / nu).powf(-1.5) * PI.sqrt() / (2.0 * 2f64.sqrt());
        assert!((t.step - want).abs() < 1e-9 * want);
        let goe = theta_asymptotic(&inputs(1, &w, &phi, &m, Beta::Real), Form::OmegaZero).unwrap();
        assert!((goe.step - 2.0 * t.step).abs() < 1e-12 * want);
    }

    #[test]
    fn form_gates() {
        let phi = TestFunction::gaussian();
        let m = MomentTensors::step_limit(1);
        let w = Window::centred(0.0, 0.05, 0.04, 0.1).unwrap();
        let inp = inputs(1, &w, &phi, &m, Beta::Complex);
        assert!(matches!(theta_asymptotic(&inp, Form::OmegaLarge), Err(Error::FormMismatch(_))));
        assert!(matches!(theta_asymptotic(&inp, Form::OmegaZero), Err(Error::FormMismatch(_))));
        let m3 = MomentTensors::step_limit(3);
        let w2 = Window::centred(0.0, 0.3, 0.001, 0.1).unwrap();
        let mut d2 = m3.clone();
        d2.dim = 2;
        d2.d = vec![0.125, 0.0, 0.0, 0.125];
        assert!(theta_asymptotic(&inputs(2, &w2, &phi, &d2, Beta::Complex), Form::OmegaLarge).is_err());
    }

    #[test]
    fn wigner() {
        let phi = TestFunction::cauchy();
        let w = Window::centred(0.0, 0.1, 0.01, 0.1).unwrap();
        let v = wigner_theta(Beta::Complex, &w, &phi, &phi, Form::OmegaLarge).unwrap();
        let nu = 2.0 / PI;
        assert!((v + 4.0 / (2.0 * PI.powi(4) * nu.powi(4) * 0.01)).abs() < 1e-9 * v.abs());
        assert!(wigner_theta(Beta::Complex, &w, &phi, &phi, Form::OmegaZero).is_err());
    }
}
