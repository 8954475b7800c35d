//! Separable multi-dimensional DFT over the torus grid.
//!
//! With `std` each line goes through `rustfft`; without it a direct
//! `O(L^2)` transform per line is used, which is fine for the small grids
//! a `no_std` target is expected to handle.

use crate::prelude::*;

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `sum_x e^{-2 pi i p.x / L} f(x)`
    Forward,
    /// `sum_p e^{+2 pi i p.x / L} f(p)` (unnormalised)
    Inverse,
}

pub(crate) fn transform(data: &mut [Complex64], d: usize, l: usize, dir: Direction) {
    debug_assert_eq!(data.len(), l.pow(d as u32));
    let mut line = LineTransform::new(l, dir);
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    for axis in 0..d {
        let stride = l.pow((d - 1 - axis) as u32);
        let block = stride * l;
        for start in (0..data.len()).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = data[base + j * stride];
                }
                line.run(&mut buf);
                for (j, b) in buf.iter().enumerate() {
                    data[base + j * stride] = *b;
                }
            }
        }
    }
}

#[cfg(feature = "std")]
struct LineTransform {
    fft: Arc<dyn rustfft::Fft<f64>>,
    scratch: Vec<Complex64>,
}

#[cfg(feature = "std")]
impl LineTransform {
    fn new(l: usize, dir: Direction) -> Self {
        let mut planner = rustfft::FftPlanner::new();
        let fft = match dir {
            Direction::Forward => planner.plan_fft_forward(l),
            Direction::Inverse => planner.plan_fft_inverse(l),
        };
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        Self { fft, scratch }
    }

    fn run(&mut self, buf: &mut [Complex64]) {
        self.fft.process_with_scratch(buf, &mut self.scratch);
    }
}

#[cfg(not(feature = "std"))]
struct LineTransform {
    twiddle: Vec<Complex64>,
    out: Vec<Complex64>,
}

#[cfg(not(feature = "std"))]
impl LineTransform {
    fn new(l: usize, dir: Direction) -> Self {
        let sign = if dir == Direction::Forward { -1.0 } else { 1.0 };
        let twiddle = (0..l)
            .map(|k| {
                let a = sign * 2.0 * PI * k as f64 / l as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        Self { twiddle, out: vec![Complex64::new(0.0, 0.0); l] }
    }

    fn run(&mut self, buf: &mut [Complex64]) {
        let l = buf.len();
        for (p, o) in self.out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, v) in buf.iter().enumerate() {
                acc += *v * self.twiddle[(p * x) % l];
            }
            *o = acc;
        }
        buf.copy_from_slice(&self.out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_2d() {
        let (d, l) = (2, 6);
        let orig: Vec<Complex64> =
            (0..36).map(|i| c64((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let mut data = orig.clone();
        transform(&mut data, d, l, Direction::Forward);
        transform(&mut data, d, l, Direction::Inverse);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / 36.0 - b).norm() < 1e-13);
        }
    }

    #[test]
    fn matches_direct_sum() {
        let (d, l) = (2, 5);
        let orig: Vec<Complex64> = (0..25).map(|i| c64(i as f64, -(i as f64) * 0.5)).collect();
        let mut data = orig.clone();
        transform(&mut data, d, l, Direction::Forward);
        for p0 in 0..l {
            for p1 in 0..l {
                let mut acc = c64(0.0, 0.0);
                for x0 in 0..l {
                    for x1 in 0..l {
                        let a = -2.0 * PI * ((p0 * x0 + p1 * x1) as f64) / l as f64;
                        acc += orig[x0 * l + x1] * c64(a.cos(), a.sin());
                    }
                }
                assert!((acc - data[p0 * l + p1]).norm() < 1e-11);
            }
        }
    }
}
