//! The pair of energies at which densities are compared.

use crate::error::{invalid, Result};

/// Energies `E_1 <= E_2` in `[-1 + κ, 1 - κ]` with resolution `η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub e1: f64,
    pub e2: f64,
    /// `(E_1 + E_2) / 2`.
    pub e: f64,
    /// `E_2 - E_1 >= 0`.
    pub omega: f64,
    pub eta: f64,
    pub kappa: f64,
    /// Whether the energies were given in decreasing order and exchanged;
    /// anything attached to them must be exchanged too.
    pub swapped: bool,
}

impl Window {
    /// Builds a window, swapping the energies if needed so that `ω >= 0`.
    pub fn new(e1: f64, e2: f64, eta: f64, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(invalid(alloc::format!("kappa = {kappa} outside (0, 1)")));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(invalid(alloc::format!("eta = {eta} must be positive")));
        }
        for e in [e1, e2] {
            if !(e.abs() <= 1.0 - kappa) {
                return Err(invalid(alloc::format!("energy {e} outside [-1 + kappa, 1 - kappa] with kappa = {kappa}")));
            }
        }
        let swapped = e2 < e1;
        let (e1, e2) = if swapped { (e2, e1) } else { (e1, e2) };
        Ok(Self { e1, e2, e: 0.5 * (e1 + e2), omega: e2 - e1, eta, kappa, swapped })
    }

    /// A pair given in the order of the energies passed to [`Window::new`],
    /// rearranged to match `(e1, e2)`.
    pub fn order<T>(&self, first: T, second: T) -> (T, T) {
        if self.swapped {
            (second, first)
        } else {
            (first, second)
        }
    }

    /// `E_1 = E_2 = e`.
    pub fn diagonal(e: f64, eta: f64, kappa: f64) -> Result<Self> {
        Self::new(e, e, eta, kappa)
    }

    /// The window centred at `e` with separation `omega`.
    pub fn centred(e: f64, omega: f64, eta: f64, kappa: f64) -> Result<Self> {
        Self::new(e - 0.5 * omega, e + 0.5 * omega, eta, kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swaps_to_nonnegative_omega() {
        let w = Window::new(0.3, -0.1, 0.05, 0.1).unwrap();
        assert_eq!((w.e1, w.e2), (-0.1, 0.3));
        assert!(w.swapped);
        assert_eq!(w.order("a", "b"), ("b", "a"));
        assert!((w.omega - 0.4).abs() < 1e-15 && (w.e - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_edge() {
        assert!(Window::new(0.95, 0.0, 0.05, 0.1).is_err());
        assert!(Window::new(0.0, 0.0, 0.0, 0.1).is_err());
        assert!(Window::new(0.0, 0.0, 0.1, 1.5).is_err());
    }
}
