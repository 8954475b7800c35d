//! Monte Carlo estimates of the mean density and of the normalised
//! covariance `⟨Y_1; Y_2⟩ / (⟨Y_1⟩⟨Y_2⟩)`.

use super::density::{half_spectrum, smoothed_density_chebyshev, statistic, TraceMode};
use crate::error::{LabError, Result};
use mesoband::ensemble::{BandMatrix, Beta};
use mesoband::kernels::{ExpansionParams, TestFunction};
use mesoband::lattice::TorusGeometry;
use mesoband::window::Window;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Minimum number of batches behind every standard error.
pub const MIN_BATCHES: usize = 8;

/// How each replica's `Y` values are computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    ExactDiag,
    Chebyshev { n_max: usize, trace_mode: TraceMode, tol: f64 },
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Self::ExactDiag => "exact_diag",
            Self::Chebyshev { .. } => "chebyshev",
        }
    }
}

/// A Monte Carlo statistic with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub value: f64,
    /// `None` when fewer than two samples make the error undefined.
    pub stderr: Option<f64>,
    pub nsamples: usize,
    pub seed: u64,
    pub method: Method,
}

/// The seed of replica `r`: SplitMix64 of the master seed mixed with `r`.
pub fn replica_seed(master: u64, r: usize) -> u64 {
    let mut z = master ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `Y` at every energy for one matrix.
pub fn densities(h: &BandMatrix, phi: &TestFunction, eta: f64, energies: &[f64], method: &Method) -> Result<Vec<f64>> {
    match *method {
        Method::ExactDiag => {
            let spec = half_spectrum(h)?;
            Ok(energies.iter().map(|&e| statistic(&spec, phi, eta, e)).collect())
        }
        Method::Chebyshev { n_max, trace_mode, tol } => {
            let params = ExpansionParams::from_eta(eta, h.geometry().mass())?;
            Ok(smoothed_density_chebyshev(h, phi, &params, energies, n_max, trace_mode, h.seed(), tol)?.values)
        }
    }
}

/// `(Y_1, Y_2)` for replicas `0..replicas`, in replica order.
pub fn sample_pairs(
    geometry: &TorusGeometry,
    beta: Beta,
    phi1: &TestFunction,
    phi2: &TestFunction,
    window: &Window,
    replicas: usize,
    seed: u64,
    method: &Method,
) -> Result<Vec<(f64, f64)>> {
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let h = BandMatrix::sample(geometry, beta, replica_seed(seed, r))?;
            pair_for(&h, phi1, phi2, window, method)
        })
        .collect()
}

/// `(Y_1, Y_2)` for one matrix, sharing the spectrum between both.
pub fn pair_for(h: &BandMatrix, phi1: &TestFunction, phi2: &TestFunction, w: &Window, method: &Method) -> Result<(f64, f64)> {
    match method {
        Method::ExactDiag => {
            let spec = half_spectrum(h)?;
            Ok((statistic(&spec, phi1, w.eta, w.e1), statistic(&spec, phi2, w.eta, w.e2)))
        }
        _ => {
            let y1 = densities(h, phi1, w.eta, &[w.e1], method)?[0];
            let y2 = densities(h, phi2, w.eta, &[w.e2], method)?[0];
            Ok((y1, y2))
        }
    }
}

/// Number of batches for `n` samples: at least [`MIN_BATCHES`], at most
/// `√n` rounded, and never more than `n`.
fn batch_count(n: usize) -> usize {
    ((n as f64).sqrt().round() as usize).max(MIN_BATCHES).min(n)
}

/// Contiguous batch boundaries, sizes differing by at most one.
fn batches(n: usize, b: usize) -> Vec<std::ops::Range<usize>> {
    (0..b).map(|i| (i * n / b)..((i + 1) * n / b)).collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Mean with a batch-means standard error.
pub fn mean_with_error(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len();
    let m = mean(values);
    if n < 2 {
        return (m, None);
    }
    let b = batch_count(n);
    let means: Vec<f64> = batches(n, b).into_iter().map(|r| mean(&values[r])).collect();
    let bm = mean(&means);
    let var = means.iter().map(|x| (x - bm).powi(2)).sum::<f64>() / (b as f64 - 1.0);
    (m, Some((var / b as f64).sqrt()))
}

/// Unbiased covariance and the two means of a set of pairs.
fn moments(pairs: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pairs.len() as f64;
    let m1 = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let m2 = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let c = pairs.iter().map(|p| (p.0 - m1) * (p.1 - m2)).sum::<f64>() / (n - 1.0);
    (c, m1, m2)
}

/// Covariance and normalised covariance with delete-one-batch jackknife
/// errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSummary {
    pub covariance: f64,
    pub covariance_stderr: f64,
    pub normalized: f64,
    pub normalized_stderr: f64,
    pub mean1: f64,
    pub mean2: f64,
    pub mean1_stderr: f64,
    pub mean2_stderr: f64,
    pub nsamples: usize,
    pub batches: usize,
}

/// Summarises per-replica pairs.
pub fn summarize_pairs(pairs: &[(f64, f64)]) -> Result<CovarianceSummary> {
    let n = pairs.len();
    if n < 2 * MIN_BATCHES {
        return Err(LabError::Estimate(format!("need at least {} samples, got {n}", 2 * MIN_BATCHES)));
    }
    let (cov, m1, m2) = moments(pairs);
    if !(m1 > 0.0 && m2 > 0.0) {
        return Err(LabError::Estimate(format!("non-positive mean density ({m1}, {m2}); cannot normalise")));
    }
    let b = batch_count(n);
    let ranges = batches(n, b);
    let mut jc = Vec::with_capacity(b);
    let mut jr = Vec::with_capacity(b);
    for r in &ranges {
        let rest: Vec<(f64, f64)> = pairs[..r.start].iter().chain(&pairs[r.end..]).copied().collect();
        let (c, a1, a2) = moments(&rest);
        jc.push(c);
        jr.push(c / (a1 * a2));
    }
    let jack = |v: &[f64]| {
        let m = mean(v);
        ((b as f64 - 1.0) / b as f64 * v.iter().map(|x| (x - m).powi(2)).sum::<f64>()).sqrt()
    };
    let y1: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let y2: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok(CovarianceSummary {
        covariance: cov,
        covariance_stderr: jack(&jc),
        normalized: cov / (m1 * m2),
        normalized_stderr: jack(&jr),
        mean1: m1,
        mean2: m2,
        mean1_stderr: mean_with_error(&y1).1.unwrap_or(f64::NAN),
        mean2_stderr: mean_with_error(&y2).1.unwrap_or(f64::NAN),
        nsamples: n,
        batches: b,
    })
}

/// Monte Carlo mean of `Y` at energy `e`.
#[allow(clippy::too_many_arguments)]
pub fn mean_density(
    geometry: &TorusGeometry,
    beta: Beta,
    phi: &TestFunction,
    eta: f64,
    e: f64,
    replicas: usize,
    seed: u64,
    method: &Method,
) -> Result<CorrelationEstimate> {
    let ys: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let h = BandMatrix::sample(geometry, beta, replica_seed(seed, r))?;
            Ok(densities(&h, phi, eta, &[e], method)?[0])
        })
        .collect::<Result<_>>()?;
    let (value, stderr) = mean_with_error(&ys);
    Ok(CorrelationEstimate { value, stderr, nsamples: replicas, seed, method: *method })
}

/// Monte Carlo estimate of the normalised covariance, with the raw pairs.
#[allow(clippy::too_many_arguments)]
pub fn mc_covariance(
    geometry: &TorusGeometry,
    beta: Beta,
    phi1: &TestFunction,
    phi2: &TestFunction,
    window: &Window,
    replicas: usize,
    seed: u64,
    method: &Method,
) -> Result<(CorrelationEstimate, CovarianceSummary, Vec<(f64, f64)>)> {
    if replicas < 16 {
        return Err(LabError::Estimate(format!("mc_covariance needs R >= 16, got {replicas}")));
    }
    let pairs = sample_pairs(geometry, beta, phi1, phi2, window, replicas, seed, method)?;
    let s = summarize_pairs(&pairs)?;
    let est = CorrelationEstimate {
        value: s.normalized,
        stderr: Some(s.normalized_stderr),
        nsamples: replicas,
        seed,
        method: *method,
    };
    Ok((est, s, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs() -> Vec<(f64, f64)> {
        (0..64).map(|i| {
            let x = (i as f64 * 0.37).sin();
            (2.0 + x, 3.0 + 0.5 * x + (i as f64 * 1.3).cos() * 0.1)
        })
        .collect()
    }

    #[test]
    fn exchange_symmetry_is_exact() {
        let p = pairs();
        let q: Vec<(f64, f64)> = p.iter().map(|&(a, b)| (b, a)).collect();
        let (a, b) = (summarize_pairs(&p).unwrap(), summarize_pairs(&q).unwrap());
        assert_eq!(a.covariance, b.covariance);
        assert_eq!(a.normalized_stderr, b.normalized_stderr);
    }

    #[test]
    fn scale_invariance() {
        let p = pairs();
        let q: Vec<(f64, f64)> = p.iter().map(|&(a, b)| (4.0 * a, 4.0 * b)).collect();
        let (a, b) = (summarize_pairs(&p).unwrap(), summarize_pairs(&q).unwrap());
        assert!((a.normalized - b.normalized).abs() < 1e-14 * a.normalized.abs());
    }

    #[test]
    fn degenerate_single_sample() {
        let (v, e) = mean_with_error(&[1.5]);
        assert_eq!((v, e), (1.5, None));
    }

    #[test]
    fn frozen_matrix_has_no_covariance() {
        let g = TorusGeometry::step(1, 32, 2).unwrap();
        let h = BandMatrix::frozen(&g).unwrap();
        let w = Window::new(0.0, 0.2, 0.1, 0.1).unwrap();
        let phi = TestFunction::cauchy();
        let p = pair_for(&h, &phi, &phi, &w, &Method::ExactDiag).unwrap();
        let s = summarize_pairs(&vec![p; 32]).unwrap();
        assert!(s.covariance.abs() < 1e-24);
    }

    #[test]
    fn reproducible_and_variance_nonnegative() {
        let g = TorusGeometry::step(1, 64, 3).unwrap();
        let w = Window::diagonal(0.1, 0.2, 0.1).unwrap();
        let phi = TestFunction::gaussian();
        let a = mc_covariance(&g, Beta::Complex, &phi, &phi, &w, 24, 9, &Method::ExactDiag).unwrap();
        let b = mc_covariance(&g, Beta::Complex, &phi, &phi, &w, 24, 9, &Method::ExactDiag).unwrap();
        assert_eq!(a.0, b.0);
        assert!(a.0.value >= -3.0 * a.0.stderr.unwrap());
        assert!(mc_covariance(&g, Beta::Complex, &phi, &phi, &w, 8, 9, &Method::ExactDiag).is_err());
    }

    #[test]
    fn seeds_differ() {
        assert_ne!(replica_seed(1, 0), replica_seed(1, 1));
        assert_ne!(replica_seed(1, 0), replica_seed(2, 0));
    }
}
