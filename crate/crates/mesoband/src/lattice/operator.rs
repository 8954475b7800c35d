use super::fft::{transform, Direction};
use super::geometry::TorusGeometry;
use crate::error::{Error, Result};
use crate::prelude::*;

/// The translation-invariant variance matrix `S` together with its eigenvalues
/// `λ_p = Σ_x e^{-2πi p·x/L} S_{x0}` on the dual torus.
///
/// The grid is stored in transform order: coordinate `q` in `0..L` is the mode
/// `p = q` for `2q < L` and `p = q - L` otherwise.
#[derive(Debug, Clone)]
pub struct VarianceOperator {
    geometry: TorusGeometry,
    symbol: Vec<f64>,
}

/// `tr S^m` and `Σ_p |λ_p|^m` for `m = 0..=max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub traces: Vec<f64>,
    pub abs_traces: Vec<f64>,
}

impl TraceTable {
    pub fn max_power(&self) -> usize {
        self.traces.len() - 1
    }
}

impl VarianceOperator {
    /// Diagonalises `S` with a fast transform of its first column.
    pub fn new(geometry: &TorusGeometry) -> Result<Self> {
        let (d, l, n) = (geometry.dim(), geometry.side(), geometry.sites());
        let mut grid = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..geometry.band_len() {
            grid[geometry.index(geometry.band_offset(k))] += geometry.band_value(k);
        }
        transform(&mut grid, d, l, Direction::Forward);
        Self::from_grid(geometry, grid)
    }

    /// Same symbol by the explicit cosine sum over band offsets, `O(N·M)`.
    pub fn direct(geometry: &TorusGeometry) -> Result<Self> {
        let (d, l, n) = (geometry.dim(), geometry.side(), geometry.sites());
        let mut grid = vec![Complex64::new(0.0, 0.0); n];
        let mut p = vec![0i64; d];
        for (q, g) in grid.iter_mut().enumerate() {
            geometry.coords(q, &mut p);
            for k in 0..geometry.band_len() {
                let dot: i64 = geometry.band_offset(k).iter().zip(&p).map(|(a, b)| a * b).sum();
                let a = -2.0 * PI * (dot.rem_euclid(l as i64)) as f64 / l as f64;
                *g += Complex64::new(a.cos(), a.sin()) * geometry.band_value(k);
            }
        }
        Self::from_grid(geometry, grid)
    }

    fn from_grid(geometry: &TorusGeometry, grid: Vec<Complex64>) -> Result<Self> {
        let iota = geometry.iota();
        let max_imag = grid.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        if max_imag > 1e-10 * iota {
            return Err(Error::AsymmetricSymbol { max_imag });
        }
        let mut symbol: Vec<f64> = grid.into_iter().map(|z| z.re).collect();
        // Row sums are exactly ℐ; pin the zero mode to remove rounding.
        symbol[0] = iota;
        Ok(Self { geometry: geometry.clone(), symbol })
    }

    pub fn geometry(&self) -> &TorusGeometry {
        &self.geometry
    }

    /// Eigenvalues in transform order.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// `λ_p` for a signed dual-lattice index.
    pub fn lambda(&self, p: &[i64]) -> f64 {
        self.symbol[self.geometry.index(p)]
    }

    /// Signed mode index of grid position `q`, with entries in `[-L/2, L/2)`.
    pub fn mode(&self, q: usize, out: &mut [i64]) {
        self.geometry.coords(q, out);
        for c in out.iter_mut() {
            *c = self.geometry.wrap(*c);
        }
    }

    /// Largest eigenvalue other than `λ_0`.
    pub fn second_eigenvalue(&self) -> f64 {
        self.symbol[1..].iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.symbol.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Calls `f(λ, multiplicity)` once per class of modes that share an
    /// eigenvalue by lattice symmetry. Step profiles are invariant under
    /// coordinate permutations and reflections, so only sorted nonnegative
    /// indices are visited; other profiles visit every mode.
    pub fn for_each_class(&self, mut f: impl FnMut(f64, f64)) {
        let g = &self.geometry;
        if !g.is_step() {
            for &lam in &self.symbol {
                f(lam, 1.0);
            }
            return;
        }
        let (d, l) = (g.dim(), g.side());
        let top = (l / 2) as i64;
        let mut a = vec![0i64; d];
        let mut fact = vec![1.0f64; d + 1];
        for i in 1..=d {
            fact[i] = fact[i - 1] * i as f64;
        }
        loop {
            let mut mult = fact[d];
            let mut run = 1usize;
            for i in 0..d {
                if i > 0 && a[i] == a[i - 1] {
                    run += 1;
                    mult /= run as f64;
                } else {
                    run = 1;
                }
                if a[i] != 0 && 2 * a[i] != l as i64 {
                    mult *= 2.0;
                }
            }
            f(self.symbol[g.index(&a)], mult);
            // next nondecreasing tuple in [0, top]
            let mut i = d;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if a[i] < top {
                    a[i] += 1;
                    for j in i + 1..d {
                        a[j] = a[i];
                    }
                    break;
                }
            }
        }
    }

    /// `tr S^b = Σ_p λ_p^b`.
    pub fn trace_power(&self, b: u32) -> f64 {
        let mut acc = Accumulator::default();
        self.for_each_class(|lam, w| acc.add(w * lam.powi(b as i32)));
        acc.total()
    }

    /// All traces up to `max` in one pass over the modes.
    pub fn trace_table(&self, max: usize) -> TraceTable {
        let mut tr = vec![Accumulator::default(); max + 1];
        let mut ab = vec![Accumulator::default(); max + 1];
        self.for_each_class(|lam, w| {
            let mut p = w;
            tr[0].add(p);
            ab[0].add(p);
            for m in 1..=max {
                p *= lam;
                tr[m].add(p);
                ab[m].add(p.abs());
            }
        });
        TraceTable {
            traces: tr.iter().map(Accumulator::total).collect(),
            abs_traces: ab.iter().map(Accumulator::total).collect(),
        }
    }

    /// First row of the circulant matrix `g(S)`: entry `z` is `g(S)_{z,0}`,
    /// indexed like sites.
    pub fn circulant_row(&self, g: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let geo = &self.geometry;
        let n = geo.sites() as f64;
        let mut grid: Vec<Complex64> = self.symbol.iter().map(|&lam| g(lam)).collect();
        transform(&mut grid, geo.dim(), geo.side(), Direction::Inverse);
        for z in grid.iter_mut() {
            *z /= n;
        }
        grid
    }

    /// Row of `Z(αS)` with `Z(x) = Σ_{b=1}^{cutoff} x^b`, indexed by `x - y`.
    pub fn resolvent_row(&self, alpha: Complex64, cutoff: usize) -> Result<Vec<Complex64>> {
        if cutoff == 0 {
            return Err(Error::InvalidArgument("cutoff must be at least 1".into()));
        }
        Ok(self.circulant_row(|lam| partial_geometric(alpha * lam, cutoff)))
    }

    /// `Z(αS)_xy`.
    pub fn resolvent_entry(&self, alpha: Complex64, cutoff: usize, x: usize, y: usize) -> Result<Complex64> {
        let row = self.resolvent_row(alpha, cutoff)?;
        let mut disp = vec![0i64; self.geometry.dim()];
        self.geometry.displacement(x, y, &mut disp);
        Ok(row[self.geometry.index(&disp)])
    }

    /// Reconstructs `S_{x0}` for every site from the symbol.
    pub fn reconstruct_column(&self) -> Vec<f64> {
        self.circulant_row(|lam| Complex64::new(lam, 0.0)).into_iter().map(|z| z.re).collect()
    }
}

/// `Σ_{b=1}^{k} z^b`, summed directly near the removable point `z = 1`.
pub fn partial_geometric(z: Complex64, k: usize) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if k <= 64 || (one - z).norm() < 1e-3 {
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in 0..k {
            acc = (acc + one) * z;
        }
        return acc;
    }
    z * (one - z.powu(k as u32)) / (one - z)
}

/// Two-level summation: exact enough for the mode counts used here without
/// the cost of full compensation.
#[derive(Clone, Copy, Default)]
pub(crate) struct Accumulator {
    block: f64,
    count: u32,
    total: f64,
}

impl Accumulator {
    #[inline]
    pub(crate) fn add(&mut self, v: f64) {
        self.block += v;
        self.count += 1;
        if self.count == 1024 {
            self.total += self.block;
            self.block = 0.0;
            self.count = 0;
        }
    }

    pub(crate) fn total(&self) -> f64 {
        self.total + self.block
    }
}
