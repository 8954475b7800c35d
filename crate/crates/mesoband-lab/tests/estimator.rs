use mesoband::ensemble::{chebyshev_nb, BandMatrix, Beta, DenseMatrix};
use mesoband::kernels::{smoothed_gamma_all, TestFunction};
use mesoband::lattice::TorusGeometry;
use mesoband::window::Window;
use mesoband::Complex64;
use mesoband_lab::estimator::{eigenvalues, hermitian_eigen, mean_density, poisson_covariance, sample_pairs, summarize_pairs, Method};

#[test]
fn expansion_reproduces_the_matrix_function() {
    let g = TorusGeometry::step(1, 160, 4).unwrap();
    let h = BandMatrix::sample(&g, Beta::Complex, 8).unwrap();
    let phi = TestFunction::gaussian();
    let (eta, e, n_max) = (0.35, 0.2, 60);
    let c = smoothed_gamma_all(n_max, e, eta, &phi, g.mass(), 1e-14).unwrap();
    let n = g.sites();
    let mut sum = DenseMatrix::zeros(n);
    for (k, ck) in c.iter().enumerate() {
        sum = sum.combine(Complex64::new(1.0, 0.0), &chebyshev_nb(&h, k).unwrap(), Complex64::new(2.0 * ck.re, 0.0));
    }
    let (w, v) = hermitian_eigen(&h.to_dense().unwrap(), false, true).unwrap();
    let f: Vec<f64> = w.iter().map(|l| phi.rescaled(0.5 * l - e, eta)).collect();
    let mut oracle = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let x: Complex64 = (0..n).map(|k| v[i + k * n] * f[k] * v[j + k * n].conj()).sum();
            oracle.set(i, j, x);
        }
    }
    assert!(sum.max_abs_diff(&oracle) < 1e-6, "{}", sum.max_abs_diff(&oracle));
}

#[test]
fn spectrum_stays_near_the_bulk() {
    let g = TorusGeometry::step(1, 1024, 8).unwrap();
    let h = BandMatrix::sample(&g, Beta::Complex, 1).unwrap();
    let w = eigenvalues(&h).unwrap();
    let eps = w.iter().map(|l| (0.5 * l).abs() - 1.0).fold(f64::NEG_INFINITY, f64::max);
    assert!(eps < 0.2, "{eps}");
}

#[test]
fn mean_density_near_the_semicircle() {
    let g = TorusGeometry::step(1, 512, 16).unwrap();
    let est = mean_density(&g, Beta::Complex, &TestFunction::gaussian(), 0.1, 0.0, 8, 5, &Method::ExactDiag).unwrap();
    assert!((est.value - 4.0).abs() < 0.1 * 4.0, "{}", est.value);
    assert!(est.stderr.unwrap() >= 0.0);
    let one = mean_density(&g, Beta::Complex, &TestFunction::gaussian(), 0.1, 0.0, 1, 5, &Method::ExactDiag).unwrap();
    assert!(one.stderr.is_none() && one.value.is_finite());
}

#[test]
fn exchange_and_scale_on_sampled_pairs() {
    let g = TorusGeometry::step(1, 96, 4).unwrap();
    let w = Window::new(-0.2, 0.1, 0.2, 0.1).unwrap();
    let (c, gs) = (TestFunction::cauchy(), TestFunction::gaussian());
    let p = sample_pairs(&g, Beta::Real, &c, &gs, &w, 32, 2, &Method::ExactDiag).unwrap();
    let swapped: Vec<(f64, f64)> = p.iter().map(|&(a, b)| (b, a)).collect();
    let (a, b) = (summarize_pairs(&p).unwrap(), summarize_pairs(&swapped).unwrap());
    assert_eq!(a.normalized, b.normalized);
    let scaled = sample_pairs(&g, Beta::Real, &c.scaled(-3.0), &gs.scaled(0.5), &w, 32, 2, &Method::ExactDiag).unwrap();
    let s = summarize_pairs(&scaled).unwrap_err();
    assert!(s.to_string().contains("non-positive"));
    let scaled = sample_pairs(&g, Beta::Real, &c.scaled(3.0), &gs.scaled(0.5), &w, 32, 2, &Method::ExactDiag).unwrap();
    let s = summarize_pairs(&scaled).unwrap();
    assert!((s.normalized - a.normalized).abs() < 1e-12 * a.normalized.abs());
}

#[test]
fn poisson_reference_is_reproducible() {
    let w = Window::centred(0.0, 0.3, 0.05, 0.1).unwrap();
    let phi = TestFunction::bump();
    let a = poisson_covariance(64, &phi, &phi, &w, 32, 1).unwrap();
    let b = poisson_covariance(64, &phi, &phi, &w, 32, 1).unwrap();
    assert_eq!(a, b);
}
