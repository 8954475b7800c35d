//! The smoothed density `Y = (1/N) tr φ^η(H/2 - E)`.

use super::eig::eigenvalues;
use crate::error::{LabError, Result};
use mesoband::ensemble::{nb_vector_stream, BandMatrix};
use mesoband::kernels::{coefficient_envelope, smoothed_gamma_all, ExpansionParams, TestFunction};
use mesoband::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// `(1/N) Σ_i φ^η(λ_i - E)` for eigenvalues `λ_i` of `H/2`.
pub fn statistic(half_spectrum: &[f64], phi: &TestFunction, eta: f64, e: f64) -> f64 {
    let n = half_spectrum.len() as f64;
    half_spectrum.iter().map(|&l| phi.rescaled(l - e, eta)).sum::<f64>() / n
}

/// Eigenvalues of `H/2`.
pub fn half_spectrum(h: &BandMatrix) -> Result<Vec<f64>> {
    Ok(eigenvalues(h)?.into_iter().map(|l| 0.5 * l).collect())
}

/// `Y` by exact diagonalisation.
pub fn smoothed_density_exact(h: &BandMatrix, phi: &TestFunction, eta: f64, e: f64) -> Result<f64> {
    Ok(statistic(&half_spectrum(h)?, phi, eta, e))
}

/// How `tr H^{(n)}` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    /// Sweep over all unit vectors.
    Exact,
    /// Rademacher probes `v` with `tr A ≈ mean v* A v`.
    Probes(usize),
}

/// `tr H^{(n)}` for `n = 0..=n_max` with per-order standard errors (zero for
/// exact sweeps).
#[derive(Debug, Clone, PartialEq)]
pub struct NbTraces {
    pub traces: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Traces of the nonbacktracking powers.
pub fn nb_traces(h: &BandMatrix, n_max: usize, mode: TraceMode, seed: u64) -> Result<NbTraces> {
    let n = h.sites();
    match mode {
        TraceMode::Exact => {
            let mut traces = vec![0.0; n_max + 1];
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            for x in 0..n {
                v[x] = Complex64::new(1.0, 0.0);
                for (k, col) in nb_vector_stream(h, &v, n_max)?.enumerate() {
                    traces[k] += col[x].re;
                }
                v[x] = Complex64::new(0.0, 0.0);
            }
            Ok(NbTraces { traces, stderr: vec![0.0; n_max + 1] })
        }
        TraceMode::Probes(k) => {
            if k < 8 {
                return Err(LabError::Estimate(format!("Probes({k}) needs at least 8 probes")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sum = vec![0.0; n_max + 1];
            let mut sum2 = vec![0.0; n_max + 1];
            for _ in 0..k {
                let v: Vec<Complex64> =
                    (0..n).map(|_| Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0)).collect();
                for (m, w) in nb_vector_stream(h, &v, n_max)?.enumerate() {
                    let q: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
                    sum[m] += q;
                    sum2[m] += q * q;
                }
            }
            let kf = k as f64;
            let traces: Vec<f64> = sum.iter().map(|s| s / kf).collect();
            let stderr = sum2
                .iter()
                .zip(&traces)
                .map(|(s2, mean)| ((s2 / kf - mean * mean).max(0.0) * kf / (kf - 1.0) / kf).sqrt())
                .collect();
            Ok(NbTraces { traces, stderr })
        }
    }
}

/// Output of [`smoothed_density_chebyshev`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevDensity {
    pub values: Vec<f64>,
    /// Probe noise propagated through the coefficients.
    pub stderr: Vec<f64>,
    /// Bound on the omitted orders, from the coefficient envelope.
    pub truncation: Vec<f64>,
}

/// `Y(E) = (1/N) Σ_{n <= n_max} 2 Re c_n(E) tr H^{(n)}` for every `E`,
/// sharing the traces.
///
/// The truncation estimate uses `|tr H^{(n)}| <= N ((n+1) + (n-1)/(M-1))`,
/// valid while the spectrum of `H/2` stays in `[-1, 1]`; it fails when the
/// estimate exceeds `tol`.
pub fn smoothed_density_chebyshev(
    h: &BandMatrix,
    phi: &TestFunction,
    params: &ExpansionParams,
    energies: &[f64],
    n_max: usize,
    mode: TraceMode,
    seed: u64,
    tol: f64,
) -> Result<ChebyshevDensity> {
    if n_max == 0 {
        return Err(LabError::Estimate("n_max must be at least 1".into()));
    }
    let g = h.geometry();
    let (mass, n) = (g.mass(), g.sites() as f64);
    let r = 1.0 / (mass - 1.0);
    let tr = nb_traces(h, n_max, mode, seed)?;
    let mut out = ChebyshevDensity { values: Vec::new(), stderr: Vec::new(), truncation: Vec::new() };
    for &e in energies {
        let c = smoothed_gamma_all(n_max, e, params.eta, phi, mass, 1e-13)?;
        let env = coefficient_envelope(n_max, e, params.eta, phi, mass, 1e-13)?;
        let value: f64 = c.iter().zip(&tr.traces).map(|(ck, t)| 2.0 * ck.re * t).sum::<f64>() / n;
        let var: f64 = c.iter().zip(&tr.stderr).map(|(ck, s)| (2.0 * ck.re * s).powi(2)).sum::<f64>();
        let mut tail = 0.0;
        let mut k = n_max + 1;
        loop {
            let term = 2.0 * env.at(k) * ((k + 1) as f64 + (k as f64 - 1.0) * r);
            tail += term;
            if term < 1e-18 * tail.max(1e-300) || k > n_max + 100_000 {
                break;
            }
            k += 1;
        }
        if tail > tol {
            return Err(LabError::Estimate(format!("Chebyshev truncation estimate {tail:e} exceeds {tol:e} at E = {e}")));
        }
        out.values.push(value);
        out.stderr.push(var.sqrt() / n);
        out.truncation.push(tail);
    }
    Ok(out)
}
