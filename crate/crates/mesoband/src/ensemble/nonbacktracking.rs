use super::dense::DenseMatrix;
use super::matrix::{BandMatrix, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::prelude::*;

/// Largest order accepted by [`nonbacktracking_direct`].
pub const DIRECT_MAX_ORDER: usize = 6;

/// `H^{(n)}` by summing every path `x_0 … x_n` with `x_i ≠ x_{i+2}`.
///
/// Brute force, `O(N · K^n)` work; intended only as an oracle.
pub fn nonbacktracking_direct(h: &BandMatrix, n: usize) -> Result<DenseMatrix> {
    let g = h.geometry();
    let (sites, k_len) = (g.sites(), g.band_len());
    if n > DIRECT_MAX_ORDER {
        return Err(Error::Oversize(alloc::format!("order {n} > {DIRECT_MAX_ORDER}")));
    }
    if sites > DENSE_LIMIT {
        return Err(Error::Oversize(alloc::format!("N = {sites} > {DENSE_LIMIT}")));
    }
    let paths = (sites as f64) * (k_len as f64).powi(n as i32);
    if paths > 4.3e9 {
        return Err(Error::Oversize(alloc::format!("{paths:e} paths")));
    }
    let mut out = DenseMatrix::zeros(sites);
    let values = h.band_values();
    let mut path = vec![0usize; n + 1];
    for x0 in 0..sites {
        path[0] = x0;
        walk(h, values, k_len, n, 0, c64(1.0, 0.0), &mut path, &mut out);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    h: &BandMatrix,
    values: &[Complex64],
    k_len: usize,
    n: usize,
    depth: usize,
    weight: Complex64,
    path: &mut [usize],
    out: &mut DenseMatrix,
) {
    if depth == n {
        out.add_to(path[0], path[n], weight);
        return;
    }
    let x = path[depth];
    for k in 0..k_len {
        let y = h.neighbour(x, k);
        if depth >= 1 && y == path[depth - 1] {
            continue;
        }
        path[depth + 1] = y;
        walk(h, values, k_len, n, depth + 1, weight * values[x * k_len + k], path, out);
    }
}

/// `U_n(H/2) - U_{n-2}(H/2)/(M-1)` with `U_{k+1}(x) = 2x U_k(x) - U_{k-1}(x)`,
/// `U_0 = 1`, `U_1(x) = 2x`; orders `0` and `1` are `I` and `H`.
///
/// Equals `H^{(n)}` when every `|H_xy|²` equals `1/(M-1)` on the band.
pub fn chebyshev_nb(h: &BandMatrix, n: usize) -> Result<DenseMatrix> {
    let hd = h.to_dense()?;
    let sites = hd.dim();
    match n {
        0 => return Ok(DenseMatrix::identity(sites)),
        1 => return Ok(hd),
        _ => {}
    }
    let one = c64(1.0, 0.0);
    let (mut prev, mut cur) = (DenseMatrix::identity(sites), hd.clone());
    let mut older = DenseMatrix::zeros(sites);
    for _ in 1..n {
        let next = hd.matmul(&cur).combine(one, &prev, -one);
        older = core::mem::replace(&mut prev, core::mem::replace(&mut cur, next));
    }
    // cur = U_n, prev = U_{n-1}, older = U_{n-2}
    let r = 1.0 / (h.geometry().mass() - 1.0);
    Ok(cur.combine(one, &older, c64(-r, 0.0)))
}

/// Streams `H^{(n)} v` for `n = 0..=n_max` via
/// `H^{(2)} = H² - ℐ`, `H^{(n+1)} = H H^{(n)} - H^{(n-1)}`.
pub fn nb_vector_stream<'a>(h: &'a BandMatrix, v: &[Complex64], n_max: usize) -> Result<NbStream<'a>> {
    if v.len() != h.sites() {
        return Err(Error::LengthMismatch { expected: h.sites(), got: v.len() });
    }
    Ok(NbStream { h, prev: Vec::new(), cur: v.to_vec(), n: 0, n_max })
}

/// Iterator returned by [`nb_vector_stream`].
#[derive(Debug)]
pub struct NbStream<'a> {
    h: &'a BandMatrix,
    prev: Vec<Complex64>,
    cur: Vec<Complex64>,
    n: usize,
    n_max: usize,
}

impl Iterator for NbStream<'_> {
    type Item = Vec<Complex64>;

    fn next(&mut self) -> Option<Vec<Complex64>> {
        if self.n > self.n_max {
            return None;
        }
        let out = self.cur.clone();
        if self.n < self.n_max {
            let mut next = vec![c64(0.0, 0.0); self.cur.len()];
            self.h.apply_into(&self.cur, &mut next).expect("lengths fixed at construction");
            match self.n {
                0 => {}
                1 => {
                    let iota = self.h.geometry().iota();
                    for (a, b) in next.iter_mut().zip(&self.prev) {
                        *a -= b * iota;
                    }
                }
                _ => {
                    for (a, b) in next.iter_mut().zip(&self.prev) {
                        *a -= b;
                    }
                }
            }
            self.prev = core::mem::replace(&mut self.cur, next);
        }
        self.n += 1;
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::Beta;
    use crate::lattice::TorusGeometry;

    #[test]
    fn low_orders() {
        let g = TorusGeometry::step(1, 16, 2).unwrap();
        let h = BandMatrix::sample(&g, Beta::Complex, 1).unwrap();
        let hd = h.to_dense().unwrap();
        assert_eq!(nonbacktracking_direct(&h, 0).unwrap(), DenseMatrix::identity(16));
        assert!(nonbacktracking_direct(&h, 1).unwrap().max_abs_diff(&hd) < 1e-15);
        let mut sq = hd.matmul(&hd);
        for i in 0..16 {
            sq.set(i, i, c64(0.0, 0.0));
        }
        assert!(nonbacktracking_direct(&h, 2).unwrap().max_abs_diff(&sq) < 1e-14);
        let two = chebyshev_nb(&h, 2).unwrap();
        let want = hd.matmul(&hd).combine(c64(1.0, 0.0), &DenseMatrix::identity(16), c64(-g.iota(), 0.0));
        assert!(two.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn chebyshev_identity_small() {
        let g = TorusGeometry::step(1, 20, 3).unwrap();
        for beta in [Beta::Real, Beta::Complex] {
            let h = BandMatrix::sample(&g, beta, 9).unwrap();
            for n in 0..=5 {
                let a = nonbacktracking_direct(&h, n).unwrap();
                let b = chebyshev_nb(&h, n).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn stream_matches_dense() {
        let g = TorusGeometry::step(2, 6, 1).unwrap();
        let h = BandMatrix::sample(&g, Beta::Complex, 4).unwrap();
        let v: Vec<Complex64> = (0..g.sites()).map(|i| c64(1.0 / (1.0 + i as f64), 0.5)).collect();
        let terms: Vec<_> = nb_vector_stream(&h, &v, 7).unwrap().collect();
        assert_eq!(terms.len(), 8);
        assert_eq!(terms[0], v);
        for (n, t) in terms.iter().enumerate() {
            let want = chebyshev_nb(&h, n).unwrap().mul_vec(&v);
            for (a, b) in t.iter().zip(&want) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_oversize() {
        let g = TorusGeometry::step(1, 16, 2).unwrap();
        let h = BandMatrix::sample(&g, Beta::Real, 0).unwrap();
        assert!(nonbacktracking_direct(&h, 7).is_err());
    }
}
