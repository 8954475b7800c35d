//! Sampling, estimation, file formats and the experiment harness built on
//! [`mesoband`].

pub mod cli;
pub mod error;
pub mod estimator;
pub mod formats;
pub mod harness;

pub use error::{LabError, Result};
