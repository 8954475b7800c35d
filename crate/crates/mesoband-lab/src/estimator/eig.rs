//! Eigenvalues of sampled matrices through LAPACK.

use crate::error::{LabError, Result};
use mesoband::ensemble::{BandMatrix, Beta, DenseMatrix, DENSE_LIMIT};
use mesoband::Complex64;

fn check(routine: &'static str, info: i32) -> Result<()> {
    if info != 0 {
        return Err(LabError::Lapack { routine, info });
    }
    Ok(())
}

/// Order `0, L-1, 1, L-2, …` that folds a periodic chain into a band of
/// width `2W + 1`; `pos[x]` is the row of site `x`.
fn zigzag(l: usize) -> Vec<usize> {
    let mut pos = vec![0; l];
    let (mut lo, mut hi) = (0, l);
    let mut k = 0;
    while lo < hi {
        pos[lo] = k;
        k += 1;
        lo += 1;
        if lo < hi {
            hi -= 1;
            pos[hi] = k;
            k += 1;
        }
    }
    pos
}

/// A permutation that keeps `h` banded, and the resulting half-bandwidth.
fn banded_order(h: &BandMatrix) -> Option<(Vec<usize>, usize)> {
    let g = h.geometry();
    if g.dim() != 1 {
        return None;
    }
    let pos = zigzag(g.side());
    let mut kd = 0;
    for x in 0..g.sites() {
        for k in 0..g.band_len() {
            let y = h.neighbour(x, k);
            kd = kd.max(pos[x].abs_diff(pos[y]));
        }
    }
    (4 * kd < g.sites()).then_some((pos, kd))
}

/// Eigenvalues of `H` in ascending order.
///
/// One-dimensional chains use the band solvers after a zigzag reordering;
/// everything else goes through the dense solvers, guarded by
/// [`DENSE_LIMIT`].
pub fn eigenvalues(h: &BandMatrix) -> Result<Vec<f64>> {
    let n = h.sites();
    if n > DENSE_LIMIT {
        return Err(mesoband::Error::Oversize(format!("N = {n} > {DENSE_LIMIT} for exact diagonalisation")).into());
    }
    match banded_order(h) {
        Some((pos, kd)) => band_eigenvalues(h, &pos, kd),
        None => dense_eigenvalues(h),
    }
}

fn band_eigenvalues(h: &BandMatrix, pos: &[usize], kd: usize) -> Result<Vec<f64>> {
    let g = h.geometry();
    let n = g.sites();
    let ld = kd + 1;
    let values = h.band_values();
    let k_len = g.band_len();
    let mut w = vec![0.0; n];
    let mut info = 0;
    // upper storage: A(i, j) at ab[kd + i - j + j * ld] for i <= j
    match h.beta() {
        Beta::Real => {
            let mut ab = vec![0.0; ld * n];
            for x in 0..n {
                for k in 0..k_len {
                    let (i, j) = (pos[x], pos[h.neighbour(x, k)]);
                    if i <= j {
                        ab[kd + i - j + j * ld] += values[x * k_len + k].re;
                    }
                }
            }
            let mut work = vec![0.0; 3 * n];
            let mut z = [0.0];
            unsafe { lapack::dsbev(b'N', b'U', n as i32, kd as i32, &mut ab, ld as i32, &mut w, &mut z, 1, &mut work, &mut info) };
            check("dsbev", info)?;
        }
        Beta::Complex => {
            let mut ab = vec![Complex64::new(0.0, 0.0); ld * n];
            for x in 0..n {
                for k in 0..k_len {
                    let (i, j) = (pos[x], pos[h.neighbour(x, k)]);
                    if i <= j {
                        ab[kd + i - j + j * ld] += values[x * k_len + k];
                    }
                }
            }
            let mut work = vec![Complex64::new(0.0, 0.0); n];
            let mut rwork = vec![0.0; (3 * n).saturating_sub(2).max(1)];
            let mut z = [Complex64::new(0.0, 0.0)];
            unsafe {
                lapack::zhbev(
                    b'N', b'U', n as i32, kd as i32, &mut ab, ld as i32, &mut w, &mut z, 1, &mut work, &mut rwork, &mut info,
                )
            };
            check("zhbev", info)?;
        }
    }
    Ok(w)
}

fn dense_eigenvalues(h: &BandMatrix) -> Result<Vec<f64>> {
    let d = h.to_dense()?;
    Ok(hermitian_eigen(&d, h.beta() == Beta::Real, false)?.0)
}

/// Eigenvalues and, if requested, column-major eigenvectors of a Hermitian
/// matrix. `real` selects the real symmetric solver.
pub fn hermitian_eigen(a: &DenseMatrix, real: bool, vectors: bool) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let n = a.dim();
    let jobz = if vectors { b'V' } else { b'N' };
    let mut w = vec![0.0; n];
    let mut info = 0;
    // row-major Hermitian input: the transpose is the conjugate, so read the
    // upper triangle of the column-major view from the lower triangle.
    if real {
        let mut m: Vec<f64> = a.data().iter().map(|z| z.re).collect();
        let mut query = [0.0];
        unsafe { lapack::dsyev(jobz, b'L', n as i32, &mut m, n as i32, &mut w, &mut query, -1, &mut info) };
        check("dsyev", info)?;
        let mut work = vec![0.0; query[0] as usize];
        let lwork = work.len() as i32;
        unsafe { lapack::dsyev(jobz, b'L', n as i32, &mut m, n as i32, &mut w, &mut work, lwork, &mut info) };
        check("dsyev", info)?;
        let v = if vectors { m.into_iter().map(|x| Complex64::new(x, 0.0)).collect() } else { Vec::new() };
        Ok((w, v))
    } else {
        // column-major storage of the conjugate transpose equals row-major `a`
        let mut m: Vec<Complex64> = a.data().iter().map(|z| z.conj()).collect();
        let mut rwork = vec![0.0; (3 * n).saturating_sub(2).max(1)];
        let mut query = [Complex64::new(0.0, 0.0)];
        unsafe { lapack::zheev(jobz, b'L', n as i32, &mut m, n as i32, &mut w, &mut query, -1, &mut rwork, &mut info) };
        check("zheev", info)?;
        let mut work = vec![Complex64::new(0.0, 0.0); query[0].re as usize];
        let lwork = work.len() as i32;
        unsafe { lapack::zheev(jobz, b'L', n as i32, &mut m, n as i32, &mut w, &mut work, lwork, &mut rwork, &mut info) };
        check("zheev", info)?;
        Ok((w, if vectors { m } else { Vec::new() }))
    }
}

/// `e^{-itH/2}` through the spectral decomposition.
pub fn propagator(h: &BandMatrix, t: f64) -> Result<DenseMatrix> {
    let a = h.to_dense()?;
    let n = a.dim();
    let (w, v) = hermitian_eigen(&a, false, true)?;
    let phase: Vec<Complex64> = w.iter().map(|&l| Complex64::new(0.0, -0.5 * t * l).exp()).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += v[i + k * n] * phase[k] * v[j + k * n].conj();
            }
            out[i * n + j] = acc;
        }
    }
    Ok(DenseMatrix::from_vec(n, out))
}
