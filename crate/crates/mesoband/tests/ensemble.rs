use mesoband::ensemble::{chebyshev_nb, nonbacktracking_direct, BandMatrix, Beta};
use mesoband::lattice::TorusGeometry;
use proptest::prelude::*;

fn beta() -> impl Strategy<Value = Beta> {
    prop_oneof![Just(Beta::Real), Just(Beta::Complex)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hermitian_with_prescribed_moduli(seed in any::<u64>(), b in beta(), d in 1usize..=2) {
        let g = if d == 1 { TorusGeometry::step(1, 30, 4).unwrap() } else { TorusGeometry::step(2, 7, 2).unwrap() };
        let h = BandMatrix::sample(&g, b, seed).unwrap();
        let n = g.sites();
        for x in 0..n {
            for y in 0..n {
                let v = h.entry(x, y);
                prop_assert_eq!(v, h.entry(y, x).conj());
                prop_assert!((v.norm_sqr() - g.variance_entry(x, y)).abs() < 1e-15);
                if b == Beta::Real {
                    prop_assert_eq!(v.im, 0.0);
                }
            }
        }
    }

    #[test]
    fn seed_determines_sample(seed in any::<u64>(), b in beta()) {
        let g = TorusGeometry::step(1, 24, 3).unwrap();
        let a = BandMatrix::sample(&g, b, seed).unwrap();
        let c = BandMatrix::sample(&g, b, seed).unwrap();
        prop_assert_eq!(a.band_values(), c.band_values());
    }

    #[test]
    fn chebyshev_identity(seed in any::<u64>(), b in beta(), n in 0usize..=6) {
        let g = TorusGeometry::step(1, 20, 3).unwrap();
        let h = BandMatrix::sample(&g, b, seed).unwrap();
        let direct = nonbacktracking_direct(&h, n).unwrap();
        let cheb = chebyshev_nb(&h, n).unwrap();
        prop_assert!(direct.max_abs_diff(&cheb) <= 1e-10);
    }
}
