use super::bessel::bessel_j_sequence;
use crate::prelude::*;

/// `(-i)^k`.
#[inline]
pub(crate) fn minus_i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => c64(1.0, 0.0),
        1 => c64(0.0, -1.0),
        2 => c64(-1.0, 0.0),
        _ => c64(0.0, 1.0),
    }
}

/// `α_k(t) = 2(-i)^k (k+1) J_{k+1}(t) / t`, evaluated as
/// `(-i)^k (J_k(t) + J_{k+2}(t))` so that `t = 0` needs no special case.
pub fn alpha_k(k: usize, t: f64) -> Complex64 {
    let j = bessel_j_sequence(t, k + 2);
    minus_i_pow(k) * (j[k] + j[k + 2])
}

/// `α_0(t), …, α_kmax(t)`.
pub fn alpha_sequence(t: f64, kmax: usize) -> Vec<Complex64> {
    let j = bessel_j_sequence(t, kmax + 2);
    (0..=kmax).map(|k| minus_i_pow(k) * (j[k] + j[k + 2])).collect()
}

/// Highest order needed so that every `a_n`, `n <= n_max`, is accurate to `tol`.
fn top_order(t: f64, mass: f64, n_max: usize, tol: f64) -> usize {
    let r = 1.0 / (mass - 1.0);
    // Orders past the turning point carry super-exponentially small Bessel values.
    let bessel_cut = t.ceil() as usize + 40 + (10.0 * t.cbrt()).ceil() as usize;
    let from_bessel = bessel_cut.saturating_sub(n_max) / 2 + 1;
    let from_geometric = if r < 1.0 {
        // |α| <= 2, so the tail after k terms is at most 2 r^k / (1 - r).
        ((tol * (1.0 - r) / 2.0).ln() / r.ln()).ceil().max(1.0) as usize
    } else {
        usize::MAX
    };
    n_max + 2 * from_bessel.min(from_geometric) + 2
}

/// `a_n(t) = Σ_{k>=0} α_{n+2k}(t) / (M-1)^k`.
pub fn a_n(n: usize, t: f64, mass: f64, tol: f64) -> Complex64 {
    a_sequence(t, mass, n, tol)[n]
}

/// `a_0(t), …, a_{n_max}(t)` from the backward recursion
/// `a_n = α_n + a_{n+2} / (M - 1)`.
pub fn a_sequence(t: f64, mass: f64, n_max: usize, tol: f64) -> Vec<Complex64> {
    let top = top_order(t, mass, n_max, tol);
    let alpha = alpha_sequence(t, top);
    let r = 1.0 / (mass - 1.0);
    let mut a = vec![c64(0.0, 0.0); top + 3];
    for k in (0..=top).rev() {
        a[k] = alpha[k] + a[k + 2] * r;
    }
    a.truncate(n_max + 1);
    a
}
