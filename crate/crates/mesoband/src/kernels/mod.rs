//! Test functions and the coefficients of the propagator expansion.
//!
//! `e^{-itH/2} = Σ_n a_n(t) H^{(n)}` with `a_n` built from Bessel functions;
//! integrating against a test function turns `a_n` into the smoothed
//! coefficients `(ψ^η ∗ γ_n)(E)`.

mod bessel;
mod expansion;
mod gamma;
mod smoothed;
mod test_function;

pub use bessel::{bessel_j, bessel_j_sequence};
pub use expansion::{a_n, a_sequence, alpha_k, alpha_sequence};
pub use gamma::{arcsin_upper, gamma_n, gamma_sequence, unit_root};
pub use smoothed::{
    coefficient_envelope, coefficient_envelope_at, CoefficientEnvelope, gamma_tilde, gamma_tilde_all, smoothed_gamma, smoothed_gamma_all,
    ExpansionParams,
};
pub use test_function::{CustomSpec, DecayClass, HatFn, RealFn, TestFunction, TestKind};
