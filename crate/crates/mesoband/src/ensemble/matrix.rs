use super::dense::DenseMatrix;
use crate::error::{invalid, Error, Result};
use crate::lattice::TorusGeometry;
use crate::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Largest `N` for which dense matrices are materialised.
pub const DENSE_LIMIT: usize = 4096;

/// Symmetry class of the phases `A_xy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Beta {
    /// `β = 1`: real symmetric, `A_xy = ±1`.
    Real,
    /// `β = 2`: complex Hermitian, `A_xy` uniform on the unit circle.
    Complex,
}

impl Beta {
    pub fn from_index(beta: u8) -> Result<Self> {
        match beta {
            1 => Ok(Self::Real),
            2 => Ok(Self::Complex),
            _ => Err(invalid(alloc::format!("beta must be 1 or 2, got {beta}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Self::Real => 1,
            Self::Complex => 2,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.index() as f64
    }
}

/// Row-wise neighbour table shared between samples of one geometry.
#[derive(Debug)]
struct Layout {
    /// `nbr[x * K + k]` is the site `x + o_k`.
    nbr: Vec<u32>,
    /// Index of the offset `-o_k`.
    neg: Vec<usize>,
}

impl Layout {
    fn new(g: &TorusGeometry) -> Result<Self> {
        let (n, k_len, d) = (g.sites(), g.band_len(), g.dim());
        if n > u32::MAX as usize {
            return Err(Error::Oversize(alloc::format!("N = {n} exceeds the neighbour table")));
        }
        let mut nbr = Vec::with_capacity(n * k_len);
        let mut c = vec![0i64; d];
        let mut y = vec![0i64; d];
        for x in 0..n {
            g.coords(x, &mut c);
            for k in 0..k_len {
                for ((yi, ci), oi) in y.iter_mut().zip(&c).zip(g.band_offset(k)) {
                    *yi = ci + oi;
                }
                nbr.push(g.index(&y) as u32);
            }
        }
        let mut neg = vec![usize::MAX; k_len];
        let mut minus = vec![0i64; d];
        for (k, slot) in neg.iter_mut().enumerate() {
            for (m, o) in minus.iter_mut().zip(g.band_offset(k)) {
                *m = -o;
            }
            *slot = (0..k_len)
                .find(|&j| g.band_offset(j) == minus.as_slice())
                .ok_or_else(|| Error::InvalidProfile("profile is not even".into()))?;
        }
        Ok(Self { nbr, neg })
    }
}

/// A sampled band matrix `H = √S · A`, stored by rows over the band offsets.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    geometry: TorusGeometry,
    beta: Beta,
    seed: u64,
    /// `values[x * K + k] = H_{x, x + o_k}`.
    values: Vec<Complex64>,
    layout: Arc<Layout>,
}

fn unit_phase(bits: u64) -> Complex64 {
    let u = (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let (s, c) = (2.0 * PI * u).sin_cos();
    c64(c, s)
}

impl BandMatrix {
    /// Draws `H`. Row `x` reads ChaCha8 stream `x` of `seed`, one word per
    /// band offset, so each pair is a pure function of `(seed, x, k)`.
    /// Only pairs with `x < y` (and the diagonal) are drawn; the rest is the
    /// Hermitian reflection.
    pub fn sample(geometry: &TorusGeometry, beta: Beta, seed: u64) -> Result<Self> {
        let layout = Arc::new(Layout::new(geometry)?);
        let (n, k_len) = (geometry.sites(), geometry.band_len());
        let roots: Vec<f64> = (0..k_len).map(|k| geometry.band_value(k).sqrt()).collect();
        let mut values = vec![c64(0.0, 0.0); n * k_len];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for x in 0..n {
            rng.set_stream(x as u64);
            rng.set_word_pos(0);
            for k in 0..k_len {
                let bits = rng.next_u64();
                let y = layout.nbr[x * k_len + k] as usize;
                if y < x {
                    continue;
                }
                let a = if y == x || beta == Beta::Real {
                    c64(if bits >> 63 == 1 { 1.0 } else { -1.0 }, 0.0)
                } else {
                    unit_phase(bits)
                };
                values[x * k_len + k] = a * roots[k];
            }
        }
        for x in 0..n {
            for k in 0..k_len {
                let y = layout.nbr[x * k_len + k] as usize;
                if y < x {
                    values[x * k_len + k] = values[y * k_len + layout.neg[k]].conj();
                }
            }
        }
        Ok(Self { geometry: geometry.clone(), beta, seed, values, layout })
    }

    /// The deterministic matrix `H = √S` (every `A_xy = 1`); a test hook.
    pub fn frozen(geometry: &TorusGeometry) -> Result<Self> {
        let layout = Arc::new(Layout::new(geometry)?);
        let k_len = geometry.band_len();
        let values = (0..geometry.sites() * k_len).map(|i| c64(geometry.band_value(i % k_len).sqrt(), 0.0)).collect();
        Ok(Self { geometry: geometry.clone(), beta: Beta::Real, seed: 0, values, layout })
    }

    /// Rebuilds a matrix from stored band values, checking `|H_xy|² = S_xy`
    /// and Hermiticity to `1e-12`.
    pub fn from_band_values(geometry: &TorusGeometry, beta: Beta, seed: u64, values: Vec<Complex64>) -> Result<Self> {
        let layout = Arc::new(Layout::new(geometry)?);
        let k_len = geometry.band_len();
        if values.len() != geometry.sites() * k_len {
            return Err(Error::LengthMismatch { expected: geometry.sites() * k_len, got: values.len() });
        }
        for (i, v) in values.iter().enumerate() {
            let (x, k) = (i / k_len, i % k_len);
            let s = geometry.band_value(k);
            if (v.norm_sqr() - s).abs() > 1e-12 * s.max(1.0) {
                return Err(invalid("stored entry violates |H_xy|² = S_xy"));
            }
            let y = layout.nbr[i] as usize;
            if (values[y * k_len + layout.neg[k]].conj() - v).norm() > 1e-12 || (beta == Beta::Real && v.im != 0.0) {
                return Err(invalid(alloc::format!("stored matrix is not Hermitian at row {x}")));
            }
        }
        Ok(Self { geometry: geometry.clone(), beta, seed, values, layout })
    }

    pub fn geometry(&self) -> &TorusGeometry {
        &self.geometry
    }
    pub fn beta(&self) -> Beta {
        self.beta
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn sites(&self) -> usize {
        self.geometry.sites()
    }

    /// Band values, `values[x * K + k] = H_{x, x + o_k}` with `K = band_len`.
    pub fn band_values(&self) -> &[Complex64] {
        &self.values
    }

    /// Site `x + o_k`.
    pub fn neighbour(&self, x: usize, k: usize) -> usize {
        self.layout.nbr[x * self.geometry.band_len() + k] as usize
    }

    /// Entry `H_xy` (zero outside the band).
    pub fn entry(&self, x: usize, y: usize) -> Complex64 {
        let k_len = self.geometry.band_len();
        (0..k_len)
            .find(|&k| self.layout.nbr[x * k_len + k] as usize == y)
            .map_or(c64(0.0, 0.0), |k| self.values[x * k_len + k])
    }

    /// `out = H v`.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let n = self.sites();
        if v.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: v.len() });
        }
        if out.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: out.len() });
        }
        let k_len = self.geometry.band_len();
        for (x, o) in out.iter_mut().enumerate() {
            let row = &self.values[x * k_len..(x + 1) * k_len];
            let nbr = &self.layout.nbr[x * k_len..(x + 1) * k_len];
            let mut acc = c64(0.0, 0.0);
            for (h, &y) in row.iter().zip(nbr) {
                acc += h * v[y as usize];
            }
            *o = acc;
        }
        Ok(())
    }

    /// `H v` in `O(N·M)` work.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![c64(0.0, 0.0); v.len()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    /// Dense copy of `H`; refuses `N > 4096`.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let n = self.sites();
        if n > DENSE_LIMIT {
            return Err(Error::Oversize(alloc::format!("dense matrix with N = {n} > {DENSE_LIMIT}")));
        }
        let k_len = self.geometry.band_len();
        let mut m = DenseMatrix::zeros(n);
        for x in 0..n {
            for k in 0..k_len {
                m.set(x, self.layout.nbr[x * k_len + k] as usize, self.values[x * k_len + k]);
            }
        }
        Ok(m)
    }
}
