use mesoband::ensemble::{BandMatrix, Beta};
use mesoband::lattice::TorusGeometry;
use mesoband_lab::cli::merge;
use mesoband_lab::estimator::summarize_pairs;
use mesoband_lab::formats::{read_matrix, write_matrix, CubicSpline};
use mesoband_lab::harness::ExperimentConfig;
use proptest::prelude::*;

fn pairs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((1.0f64..5.0, 1.0f64..5.0), 16..80)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exchange_symmetry(p in pairs()) {
        let q: Vec<(f64, f64)> = p.iter().map(|&(a, b)| (b, a)).collect();
        let (a, b) = (summarize_pairs(&p).unwrap(), summarize_pairs(&q).unwrap());
        prop_assert_eq!(a.normalized, b.normalized);
        prop_assert_eq!(a.covariance, b.covariance);
        prop_assert!(a.normalized_stderr >= 0.0);
    }

    #[test]
    fn scale_invariance(p in pairs(), l1 in 0.1f64..10.0, l2 in 0.1f64..10.0) {
        let q: Vec<(f64, f64)> = p.iter().map(|&(a, b)| (l1 * a, l2 * b)).collect();
        let (a, b) = (summarize_pairs(&p).unwrap(), summarize_pairs(&q).unwrap());
        prop_assert!((a.normalized - b.normalized).abs() <= 1e-10 * a.normalized.abs().max(1e-12));
    }

    #[test]
    fn spline_hits_its_nodes(ys in prop::collection::vec(-5.0f64..5.0, 4..30), step in 0.01f64..2.0) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64 * step).collect();
        let s = CubicSpline::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert!((s.eval(*x) - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn matrix_file_round_trip(seed in any::<u64>(), real in any::<bool>(), d in 1usize..=2) {
        let g = if d == 1 { TorusGeometry::step(1, 20, 3).unwrap() } else { TorusGeometry::step(2, 6, 1).unwrap() };
        let beta = if real { Beta::Real } else { Beta::Complex };
        let h = BandMatrix::sample(&g, beta, seed).unwrap();
        let mut buf = Vec::new();
        write_matrix(&h, &mut buf).unwrap();
        let back = read_matrix(buf.as_slice()).unwrap();
        prop_assert_eq!(back.band_values(), h.band_values());
        prop_assert_eq!(back.seed(), seed);
    }

    #[test]
    fn config_round_trip(l in 16usize..400, seed in any::<u64>(), e1 in -0.8f64..0.8, eta in 0.01f64..0.5, beta in 1u8..=2) {
        let text = format!(
            "[geometry]\nd = 1\nl = {l}\nw = 3\n[ensemble]\nbeta = {beta}\nseed = {}\nreplicas = 16\n[window]\ne1 = {e1}\ne2 = 0.0\neta = {eta}\n[functions]\nphi1 = {{ kind = \"bump\" }}\nphi2 = {{ kind = \"cauchy\", scale = 2.0 }}\n",
            seed >> 1
        );
        let c = ExperimentConfig::parse(&text).unwrap();
        let back = ExperimentConfig::parse(&c.to_toml().unwrap()).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.hash().unwrap(), c.hash().unwrap());
    }

    #[test]
    fn merge_prefers_the_overlay(a in 0i64..100, b in 0i64..100) {
        let mut base: toml::Table = toml::from_str(&format!("[x]\nk = {a}\nkeep = 1\n")).unwrap();
        let over: toml::Table = toml::from_str(&format!("[x]\nk = {b}\n")).unwrap();
        merge(&mut base, over);
        prop_assert_eq!(base["x"]["k"].as_integer(), Some(b));
        prop_assert_eq!(base["x"]["keep"].as_integer(), Some(1));
    }
}
