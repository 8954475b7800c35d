//! Random band matrices on the periodic lattice and the analytic machinery
//! behind their mesoscopic density correlations.
//!
//! The crate is split along the computation:
//!
//! * [`lattice`] builds the torus, the band profile and the variance operator
//!   `S`, diagonalised by the discrete Fourier transform.
//! * [`ensemble`] samples Hermitian band matrices `H` with `|H_xy|^2 = S_xy`
//!   and evaluates nonbacktracking powers.
//! * [`kernels`] holds test functions and the Bessel / Chebyshev coefficients
//!   of the propagator expansion.
//! * [`predictor`] sums the dumbbell series and evaluates the closed-form
//!   asymptotics.
//!
//! Everything here works without `std` (an allocator is required). The `std`
//! feature, on by default, switches the Fourier transforms to `rustfft`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod prelude;

pub mod ensemble;
pub mod kernels;
pub mod lattice;
pub mod predictor;
pub mod quad;
pub mod window;

pub use error::{Error, Result};
pub use num_complex::Complex64;
