//! Poissonian reference: `Poisson(2N)` points uniform on `[-1, 1]`.

use super::mc::{replica_seed, summarize_pairs, CovarianceSummary};
use crate::error::{LabError, Result};
use mesoband::kernels::TestFunction;
use mesoband::window::Window;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

/// One Poisson point configuration with mean `2N` points on `[-1, 1]`.
pub fn poisson_points(sites: usize, seed: u64) -> Result<Vec<f64>> {
    let dist = Poisson::new(2.0 * sites as f64).map_err(|e| LabError::Estimate(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = dist.sample(&mut rng) as usize;
    Ok((0..count).map(|_| rng.random_range(-1.0..=1.0)).collect())
}

/// `Y = (1/N) Σ φ^η(x - E)` over the points.
pub fn poisson_statistic(points: &[f64], sites: usize, phi: &TestFunction, eta: f64, e: f64) -> f64 {
    points.iter().map(|&x| phi.rescaled(x - e, eta)).sum::<f64>() / sites as f64
}

/// Monte Carlo normalised covariance of the Poisson reference.
pub fn poisson_covariance(
    sites: usize,
    phi1: &TestFunction,
    phi2: &TestFunction,
    window: &Window,
    replicas: usize,
    seed: u64,
) -> Result<CovarianceSummary> {
    let pairs = (0..replicas)
        .map(|r| {
            let p = poisson_points(sites, replica_seed(seed, r))?;
            Ok((
                poisson_statistic(&p, sites, phi1, window.eta, window.e1),
                poisson_statistic(&p, sites, phi2, window.eta, window.e2),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    summarize_pairs(&pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mesoband::predictor::poisson_baseline;

    #[test]
    fn matches_closed_form() {
        let (n, eta) = (200, 0.1);
        let phi = TestFunction::gaussian();
        let w = Window::centred(0.0, 0.05, eta, 0.1).unwrap();
        let s = poisson_covariance(n, &phi, &phi, &w, 4000, 3).unwrap();
        let want = poisson_baseline(n, &phi, &phi, eta, w.omega).unwrap();
        let z = (s.normalized - want) / s.normalized_stderr;
        assert!(z.abs() < 4.0, "{} vs {want}, z={z}", s.normalized);
    }

    #[test]
    fn points_stay_in_the_interval() {
        let p = poisson_points(50, 1).unwrap();
        assert!(p.iter().all(|x| x.abs() <= 1.0));
        assert!(p.len() > 50 && p.len() < 200);
    }
}
