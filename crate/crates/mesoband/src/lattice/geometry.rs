use crate::error::{Error, Result};
use crate::prelude::*;

/// Shape of the variance profile.
#[derive(Debug, Clone, PartialEq)]
pub enum BandProfile {
    /// `S_xy = 1{1 <= |x - y| <= W} / (M - 1)`.
    Step,
    /// Lattice samples `f(x / W)` listed by offset; absent offsets are zero.
    Custom(CustomProfile),
}

/// A profile given by its values at lattice offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomProfile {
    pub(crate) dim: usize,
    pub(crate) entries: Vec<(Vec<i64>, f64)>,
}

impl CustomProfile {
    /// Builds a profile from `(offset, value)` pairs. Values must be finite and
    /// nonnegative and the list must be even under `x -> -x`.
    pub fn new(dim: usize, entries: Vec<(Vec<i64>, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::UnsupportedDimension { d: 0 });
        }
        let mut entries: Vec<(Vec<i64>, f64)> =
            entries.into_iter().filter(|(_, v)| *v != 0.0).collect();
        for (o, v) in &entries {
            if o.len() != dim {
                return Err(Error::InvalidProfile("offset has the wrong dimension".into()));
            }
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidProfile("values must be finite and nonnegative".into()));
            }
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidProfile("duplicate offset".into()));
            }
        }
        for (o, v) in &entries {
            let neg: Vec<i64> = o.iter().map(|c| -c).collect();
            let mirrored = entries
                .binary_search_by(|e| e.0.cmp(&neg))
                .map(|i| entries[i].1);
            if mirrored != Ok(*v) {
                return Err(Error::InvalidProfile("profile is not even".into()));
            }
        }
        Ok(Self { dim, entries })
    }

    /// Samples `f(x / W)` on every lattice offset with `|x| <= radius * W`.
    pub fn from_fn(dim: usize, w: usize, radius: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let reach = (radius * w as f64).floor() as i64;
        let mut entries = Vec::new();
        let mut x = vec![-reach; dim];
        let mut y = vec![0.0; dim];
        loop {
            let r2: i64 = x.iter().map(|c| c * c).sum();
            if (r2 as f64) <= (radius * w as f64).powi(2) {
                for (yi, xi) in y.iter_mut().zip(&x) {
                    *yi = *xi as f64 / w as f64;
                }
                let v = f(&y);
                if v != 0.0 {
                    entries.push((x.clone(), v));
                }
            }
            if !odometer(&mut x, -reach, reach) {
                break;
            }
        }
        Self::new(dim, entries)
    }

    pub fn entries(&self) -> &[(Vec<i64>, f64)] {
        &self.entries
    }
}

/// Advances `x` through the cube `[lo, hi]^d` in lexicographic order
/// (last coordinate fastest). Returns `false` after the last point.
pub(crate) fn odometer(x: &mut [i64], lo: i64, hi: i64) -> bool {
    for c in x.iter_mut().rev() {
        if *c < hi {
            *c += 1;
            return true;
        }
        *c = lo;
    }
    false
}

/// The periodic lattice `T = ([-L/2, L/2) ∩ Z)^d` with a band profile.
///
/// Sites are numbered lexicographically with the first coordinate most
/// significant; coordinate `c` in `0..L` stands for the class of `c mod L`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGeometry {
    d: usize,
    l: usize,
    w: usize,
    profile: BandProfile,
    n: usize,
    m: f64,
    iota: f64,
    /// Nonzero profile offsets (flattened, `d` per entry) in lexicographic order.
    offsets: Vec<i64>,
    /// Unnormalised profile weight `f` for each offset.
    weights: Vec<f64>,
}

impl TorusGeometry {
    /// Validates the parameters and tabulates the band.
    pub fn new(d: usize, l: usize, w: usize, profile: BandProfile) -> Result<Self> {
        if d == 0 {
            return Err(Error::UnsupportedDimension { d });
        }
        if w == 0 || 2 * w >= l {
            return Err(Error::BandWraps { w, l });
        }
        let n = l
            .checked_pow(d as u32)
            .ok_or_else(|| Error::Oversize("L^d overflows usize".into()))?;
        let (offsets, weights) = match &profile {
            BandProfile::Step => step_band(d, w as i64),
            BandProfile::Custom(c) => {
                if c.dim != d {
                    return Err(Error::InvalidProfile("profile dimension differs from d".into()));
                }
                let mut flat = Vec::with_capacity(c.entries.len() * d);
                let mut weights = Vec::with_capacity(c.entries.len());
                for (o, v) in &c.entries {
                    // |o_i| < L/2 keeps every offset its own torus class.
                    if o.iter().any(|&ci| 2 * ci.abs() >= l as i64) {
                        return Err(Error::InvalidProfile("offset does not fit in the torus".into()));
                    }
                    flat.extend_from_slice(o);
                    weights.push(*v);
                }
                (flat, weights)
            }
        };
        let m: f64 = weights.iter().sum();
        if !(m >= 2.0) {
            return Err(Error::DegenerateMass { m });
        }
        Ok(Self { d, l, w, profile, n, m, iota: m / (m - 1.0), offsets, weights })
    }

    /// Shorthand for a step profile.
    pub fn step(d: usize, l: usize, w: usize) -> Result<Self> {
        Self::new(d, l, w, BandProfile::Step)
    }

    pub fn dim(&self) -> usize {
        self.d
    }
    pub fn side(&self) -> usize {
        self.l
    }
    pub fn width(&self) -> usize {
        self.w
    }
    pub fn profile(&self) -> &BandProfile {
        &self.profile
    }
    /// Number of sites `N = L^d`.
    pub fn sites(&self) -> usize {
        self.n
    }
    /// Profile mass `M`.
    pub fn mass(&self) -> f64 {
        self.m
    }
    /// `ℐ = M / (M - 1)`, the row sum of `S`.
    pub fn iota(&self) -> f64 {
        self.iota
    }
    pub fn is_step(&self) -> bool {
        matches!(self.profile, BandProfile::Step)
    }

    /// Number of nonzero offsets in a row of `S`.
    pub fn band_len(&self) -> usize {
        self.weights.len()
    }
    /// The `k`-th band offset.
    pub fn band_offset(&self, k: usize) -> &[i64] {
        &self.offsets[k * self.d..(k + 1) * self.d]
    }
    /// `S` entry for the `k`-th band offset.
    pub fn band_value(&self, k: usize) -> f64 {
        self.weights[k] / (self.m - 1.0)
    }
    /// Profile weight `f` (before division by `M - 1`) for the `k`-th offset.
    pub fn band_weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    /// Coordinates of site `x`, each in `0..L`.
    pub fn coords(&self, x: usize, out: &mut [i64]) {
        let mut r = x;
        for c in out.iter_mut().rev() {
            *c = (r % self.l) as i64;
            r /= self.l;
        }
    }

    /// Site index of arbitrary integer coordinates, reduced modulo `L`.
    pub fn index(&self, c: &[i64]) -> usize {
        let l = self.l as i64;
        c.iter().fold(0usize, |acc, &ci| acc * self.l + ci.rem_euclid(l) as usize)
    }

    /// Representative of `c mod L` in `[-L/2, L/2)`.
    pub fn wrap(&self, c: i64) -> i64 {
        let l = self.l as i64;
        let r = c.rem_euclid(l);
        if 2 * r >= l {
            r - l
        } else {
            r
        }
    }

    /// Minimal representative of `x - y`.
    pub fn displacement(&self, x: usize, y: usize, out: &mut [i64]) {
        let mut cy = vec![0i64; self.d];
        self.coords(x, out);
        self.coords(y, &mut cy);
        for (o, b) in out.iter_mut().zip(&cy) {
            *o = self.wrap(*o - b);
        }
    }

    /// Squared periodic Euclidean distance between two sites.
    pub fn distance_sq(&self, x: usize, y: usize) -> i64 {
        let mut dv = vec![0i64; self.d];
        self.displacement(x, y, &mut dv);
        dv.iter().map(|c| c * c).sum()
    }

    /// `S_{x0}` for a displacement already reduced to `[-L/2, L/2)^d`.
    pub fn profile_at(&self, disp: &[i64]) -> f64 {
        match &self.profile {
            BandProfile::Step => {
                let r2: i64 = disp.iter().map(|c| c * c).sum();
                let w2 = (self.w * self.w) as i64;
                if r2 >= 1 && r2 <= w2 {
                    1.0 / (self.m - 1.0)
                } else {
                    0.0
                }
            }
            BandProfile::Custom(c) => match c.entries.binary_search_by(|e| e.0.as_slice().cmp(disp)) {
                Ok(i) => c.entries[i].1 / (self.m - 1.0),
                Err(_) => 0.0,
            },
        }
    }

    /// The variance entry `S_xy`.
    pub fn variance_entry(&self, x: usize, y: usize) -> f64 {
        let mut dv = vec![0i64; self.d];
        self.displacement(x, y, &mut dv);
        self.profile_at(&dv)
    }
}

fn step_band(d: usize, w: i64) -> (Vec<i64>, Vec<f64>) {
    let mut offsets = Vec::new();
    let mut weights = Vec::new();
    let mut x = vec![-w; d];
    loop {
        let r2: i64 = x.iter().map(|c| c * c).sum();
        if r2 >= 1 && r2 <= w * w {
            offsets.extend_from_slice(&x);
            weights.push(1.0);
        }
        if !odometer(&mut x, -w, w) {
            break;
        }
    }
    (offsets, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_for_small_tori() {
        let g = TorusGeometry::step(1, 10, 2).unwrap();
        assert_eq!(g.sites(), 10);
        assert_eq!(g.mass(), 4.0);
        assert!((g.iota() - 4.0 / 3.0).abs() < 1e-15);

        let g = TorusGeometry::step(2, 6, 2).unwrap();
        assert_eq!(g.sites(), 36);
        // (±1,0),(0,±1),(±1,±1),(±2,0),(0,±2)
        assert_eq!(g.mass(), 12.0);
    }

    #[test]
    fn rejects_wrapping_band() {
        assert!(matches!(TorusGeometry::step(1, 10, 5), Err(Error::BandWraps { .. })));
        assert!(matches!(TorusGeometry::step(1, 10, 0), Err(Error::BandWraps { .. })));
        assert!(TorusGeometry::step(1, 11, 5).is_ok());
    }

    #[test]
    fn rejects_light_profile() {
        let p = CustomProfile::new(1, vec![(vec![1], 0.5), (vec![-1], 0.5)]).unwrap();
        let g = TorusGeometry::new(1, 10, 1, BandProfile::Custom(p));
        assert!(matches!(g, Err(Error::DegenerateMass { .. })));
    }

    #[test]
    fn rejects_odd_profile() {
        let p = CustomProfile::new(1, vec![(vec![1], 1.0), (vec![-1], 2.0)]);
        assert!(p.is_err());
    }

    #[test]
    fn step_entries() {
        let g = TorusGeometry::step(1, 10, 2).unwrap();
        assert!((g.variance_entry(0, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(g.variance_entry(0, 0), 0.0);
        assert!((g.variance_entry(0, 9) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(g.variance_entry(0, 5), 0.0);
        let row: f64 = (0..10).map(|y| g.variance_entry(3, y)).sum();
        assert!((row - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn periodic_norm_uses_minimal_image() {
        let g = TorusGeometry::step(2, 8, 2).unwrap();
        let x = g.index(&[0, 0]);
        let y = g.index(&[7, 6]);
        assert_eq!(g.distance_sq(x, y), 1 + 4);
        assert_eq!(g.wrap(4), -4);
        assert_eq!(g.wrap(-4), -4);
        assert_eq!(g.wrap(3), 3);
    }

    #[test]
    fn index_and_coords_round_trip() {
        let g = TorusGeometry::step(3, 5, 2).unwrap();
        let mut c = [0i64; 3];
        for x in 0..g.sites() {
            g.coords(x, &mut c);
            assert_eq!(g.index(&c), x);
        }
    }

    #[test]
    fn custom_matches_step_when_sampled_as_indicator() {
        let w = 3;
        let p = CustomProfile::from_fn(2, w, 1.0, |y| {
            let r2: f64 = y.iter().map(|v| v * v).sum();
            if r2 > 0.0 && r2 <= 1.0 + 1e-12 { 1.0 } else { 0.0 }
        })
        .unwrap();
        let g = TorusGeometry::new(2, 12, w, BandProfile::Custom(p)).unwrap();
        let s = TorusGeometry::step(2, 12, w).unwrap();
        assert_eq!(g.mass(), s.mass());
        for y in 0..g.sites() {
            assert_eq!(g.variance_entry(5, y), s.variance_entry(5, y));
        }
    }
}
