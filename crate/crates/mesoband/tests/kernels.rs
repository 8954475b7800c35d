use mesoband::ensemble::{chebyshev_nb, BandMatrix, Beta};
use mesoband::kernels::{a_sequence, smoothed_gamma_all, TestFunction};
use mesoband::lattice::TorusGeometry;
use mesoband::quad::{integrate, QuadConfig};
use mesoband::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn derivative_matches_weighted_quadrature(e in -0.8f64..0.8, n in 0usize..12) {
        let (eta, mass, h) = (0.3, 20.0, 1e-4);
        let phi = TestFunction::gaussian();
        let plus = smoothed_gamma_all(n, e + h, eta, &phi, mass, 1e-14).unwrap()[n];
        let minus = smoothed_gamma_all(n, e - h, eta, &phi, mass, 1e-14).unwrap()[n];
        let fd = (plus - minus) / (2.0 * h);
        let t_max = phi.hat_cutoff(1e-14) / eta;
        let f = |t: f64| Complex64::new(0.0, t) * Complex64::new(0.0, e * t).exp() * phi.fourier(eta * t) * a_sequence(t, mass, n, 1e-16)[n];
        let cfg = QuadConfig { abs_tol: 1e-12, rel_tol: 1e-10, max_panels: 20_000 };
        let q = integrate(f, 0.0, t_max, 64, cfg).unwrap().value;
        prop_assert!((fd - q).norm() <= 1e-4 * q.norm().max(1.0), "{fd} vs {q}");
    }
}

#[test]
fn assembled_density_is_real() {
    let g = TorusGeometry::step(1, 24, 3).unwrap();
    let h = BandMatrix::sample(&g, Beta::Complex, 4).unwrap();
    let phi = TestFunction::gaussian();
    let c = smoothed_gamma_all(6, 0.2, 0.5, &phi, g.mass(), 1e-13).unwrap();
    let mut y = Complex64::new(0.0, 0.0);
    for (n, cn) in c.iter().enumerate() {
        y += chebyshev_nb(&h, n).unwrap().trace() * (2.0 * cn.re);
    }
    assert!(y.im.abs() < 1e-10, "{y}");
}
