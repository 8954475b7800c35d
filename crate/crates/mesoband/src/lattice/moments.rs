use super::geometry::TorusGeometry;
use crate::error::{Error, Result};
use crate::prelude::*;

/// Second and (for `d = 2`) fourth moments of the profile.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTensors {
    /// `D_ij = ½ Σ_x (x_i x_j / W²) S_{x0}`, row-major `d × d`.
    pub d: Vec<f64>,
    pub dim: usize,
    /// `Q = (1/32) Σ_x S_{x0} |D^{-1/2} x/W|⁴`, only for `d = 2`.
    pub q: Option<f64>,
}

impl MomentTensors {
    /// Computes `D`, and `Q` when `d = 2`.
    pub fn new(geometry: &TorusGeometry) -> Result<Self> {
        let dim = geometry.dim();
        let w = geometry.width() as f64;
        let mut d = vec![0.0; dim * dim];
        for k in 0..geometry.band_len() {
            let o = geometry.band_offset(k);
            let s = geometry.band_value(k);
            for i in 0..dim {
                for j in 0..dim {
                    d[i * dim + j] += 0.5 * s * (o[i] as f64 / w) * (o[j] as f64 / w);
                }
            }
        }
        let chol = cholesky(&d, dim).ok_or_else(|| invalid_moment("D is not positive definite"))?;
        let q = if dim == 2 {
            let mut q = 0.0;
            let mut y = vec![0.0; dim];
            for k in 0..geometry.band_len() {
                for (yi, oi) in y.iter_mut().zip(geometry.band_offset(k)) {
                    *yi = *oi as f64 / w;
                }
                let r2 = quad_form_inverse(&chol, dim, &y);
                q += geometry.band_value(k) * r2 * r2;
            }
            Some(q / 32.0)
        } else {
            None
        };
        Ok(Self { d, dim, q })
    }

    /// Step-profile limits `D₀ = I/(2(d+2))` and, for `d = 2`, `Q₀ = 2/3`.
    pub fn step_limit(dim: usize) -> Self {
        let mut d = vec![0.0; dim * dim];
        for i in 0..dim {
            d[i * dim + i] = 1.0 / (2.0 * (dim as f64 + 2.0));
        }
        Self { d, dim, q: if dim == 2 { Some(2.0 / 3.0) } else { None } }
    }

    /// `Q`, which only exists for `d = 2`.
    pub fn q(&self) -> Result<f64> {
        self.q.ok_or(Error::UnsupportedDimension { d: self.dim })
    }

    pub fn det(&self) -> f64 {
        match cholesky(&self.d, self.dim) {
            Some(l) => (0..self.dim).map(|i| l[i * self.dim + i]).product::<f64>().powi(2),
            None => 0.0,
        }
    }

    pub fn sqrt_det(&self) -> f64 {
        self.det().sqrt()
    }
}

fn invalid_moment(msg: &str) -> Error {
    Error::InvalidProfile(msg.to_string())
}

/// Lower Cholesky factor, or `None` if `a` is not positive definite.
pub(crate) fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// `yᵀ A⁻¹ y` from the Cholesky factor of `A`.
fn quad_form_inverse(l: &[f64], n: usize, y: &[f64]) -> f64 {
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * z[k];
        }
        z[i] = s / l[i * n + i];
    }
    z.iter().map(|v| v * v).sum()
}
