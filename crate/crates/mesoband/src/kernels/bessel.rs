use crate::prelude::*;

/// `J_0(t), …, J_kmax(t)` for `t >= 0` by Miller's backward recurrence,
/// normalised with `J_0 + 2 Σ_k J_{2k} = 1`.
///
/// The start order sits well past both `kmax` and the turning point `k ≈ t`,
/// where the recurrence is stable in the downward direction for every order
/// we return.
pub fn bessel_j_sequence(t: f64, kmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if t == 0.0 {
        out[0] = 1.0;
        return out;
    }
    debug_assert!(t > 0.0, "negative argument");
    let top = (kmax as f64).max(t.ceil()) + 20.0;
    let mut m = (top + (160.0 * top).sqrt()) as usize;
    m += m % 2;

    const BIG: f64 = 1e250;
    let (mut next, mut cur) = (0.0f64, 1e-300f64);
    let mut sum = if m % 2 == 0 { 2.0 * cur } else { 0.0 };
    if m <= kmax {
        out[m] = cur;
    }
    let two_over_t = 2.0 / t;
    for k in (1..=m).rev() {
        let prev = k as f64 * two_over_t * cur - next;
        next = cur;
        cur = prev;
        let order = k - 1;
        if order <= kmax {
            out[order] = cur;
        }
        if order % 2 == 0 {
            sum += if order == 0 { cur } else { 2.0 * cur };
        }
        if cur.abs() > BIG {
            cur /= BIG;
            next /= BIG;
            sum /= BIG;
            for v in out.iter_mut().skip(order) {
                *v /= BIG;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= sum;
    }
    out
}

/// `J_k(t)` for a single order.
pub fn bessel_j(k: usize, t: f64) -> f64 {
    bessel_j_sequence(t, k)[k]
}
