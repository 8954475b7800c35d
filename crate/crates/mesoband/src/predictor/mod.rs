//! Predictions for the covariance of linear eigenvalue statistics: the
//! dumbbell series, its resolvent trace form, the closed-form asymptotics and
//! the Wigner and Poisson baselines.

mod constants;
mod dumbbell;
mod poisson;
mod report;
mod resolvent;
mod theta;

pub use constants::{k_constant, k_constant_quadrature, nu, v_d_form};
pub use dumbbell::{v_main, DumbbellEngine, DumbbellSum, TruncationBudget};
pub use poisson::poisson_baseline;
pub use report::{expected_density, infer_form, predict, PredictionReport, PredictionRequest};
pub use resolvent::resolvent_trace_form;
pub use theta::{
    normalized_covariance, theta_asymptotic, theta_from_v, wigner_theta, Form, ThetaForms, ThetaInputs,
};
