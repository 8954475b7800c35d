use crate::error::Result;
use crate::kernels::TestFunction;
use crate::prelude::*;
use crate::quad::{integrate_line, integrate_real, QuadConfig};

/// Normalised covariance of the linear statistics of a Poisson process with
/// intensity `N`: `(1/N) ∫ φ_1^η(u) φ_2^η(u - ω) du`, each `φ_j` scaled to
/// unit integral.
pub fn poisson_baseline(sites: usize, phi1: &TestFunction, phi2: &TestFunction, eta: f64, omega: f64) -> Result<f64> {
    // ∫ φ = 2π φ̂(0)
    let norm = 1.0 / (4.0 * PI * PI * phi1.fourier(0.0).re * phi2.fourier(0.0).re);
    let f = |u: f64| phi1.rescaled(u, eta) * phi2.rescaled(u - omega, eta);
    let cfg = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-10, max_panels: 100_000 };
    let overlap = match (phi1.support(), phi2.support()) {
        (Some((a1, b1)), Some((a2, b2))) => {
            let lo = (eta * a1).max(omega + eta * a2);
            let hi = (eta * b1).min(omega + eta * b2);
            Some((lo, hi))
        }
        _ => None,
    };
    let integral = match overlap {
        Some((lo, hi)) if hi <= lo => 0.0,
        Some((lo, hi)) => integrate_real(f, lo, hi, 16, cfg)?.value,
        None => integrate_line(f, 0.5 * omega, eta, cfg)?.value,
    };
    Ok(integral * norm / sites as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_closed_form() {
        // Cauchy ∗ Cauchy is Cauchy with doubled width.
        let phi = TestFunction::cauchy();
        let (eta, omega, n) = (0.02, 0.03, 1000);
        let got = poisson_baseline(n, &phi, &phi, eta, omega).unwrap();
        let want = 2.0 * eta / (PI * (omega * omega + 4.0 * eta * eta)) / n as f64;
        assert!((got - want).abs() < 1e-8 * want, "{got} vs {want}");
    }

    #[test]
    fn gaussian_closed_form() {
        let phi = TestFunction::gaussian();
        let (eta, omega, n) = (0.1, 0.05, 10);
        let got = poisson_baseline(n, &phi, &phi, eta, omega).unwrap();
        let s2 = 2.0 * eta * eta;
        let want = (-omega * omega / (2.0 * s2)).exp() / (2.0 * PI * s2).sqrt() / n as f64;
        assert!((got - want).abs() < 1e-9 * want);
    }

    #[test]
    fn disjoint_bumps_vanish() {
        let phi = TestFunction::bump();
        assert_eq!(poisson_baseline(10, &phi, &phi, 0.1, 0.5).unwrap(), 0.0);
        assert!(poisson_baseline(10, &phi, &phi, 0.1, 0.1).unwrap() > 0.0);
    }
}
