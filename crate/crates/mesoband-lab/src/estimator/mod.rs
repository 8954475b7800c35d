//! Monte Carlo estimation on sampled band matrices.

pub mod density;
pub mod eig;
pub mod mc;
pub mod poisson;

pub use density::{
    half_spectrum, nb_traces, smoothed_density_chebyshev, smoothed_density_exact, statistic, ChebyshevDensity,
    NbTraces, TraceMode,
};
pub use eig::{eigenvalues, hermitian_eigen, propagator};
pub use mc::{
    densities, mc_covariance, mean_density, mean_with_error, pair_for, replica_seed, sample_pairs, summarize_pairs,
    CorrelationEstimate, CovarianceSummary, Method, MIN_BATCHES,
};
pub use poisson::{poisson_covariance, poisson_points, poisson_statistic};
