use crate::error::{invalid, Result};
use crate::prelude::*;
use crate::quad::{integrate_real, QuadConfig};
use core::fmt;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type HatFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Cauchy,
    Gaussian,
    Custom,
}

/// `C1` is the Cauchy kernel; `C2` covers everything decaying faster than
/// any power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayClass {
    C1,
    C2,
}

/// Ingredients of a user-supplied test function. `value` and `fourier`
/// must be a Fourier pair in the convention `φ(E) = ∫ e^{-iEt} φ̂(t) dt`;
/// normalisation is applied on construction.
#[derive(Clone, Default)]
pub struct CustomSpec {
    pub name: String,
    pub value: Option<RealFn>,
    pub fourier: Option<HatFn>,
    /// Declared decay exponent: `|φ(E)| <= C (1 + |E|)^{-q}`.
    pub q: f64,
    /// `φ` vanishes outside this interval.
    pub support: Option<(f64, f64)>,
    /// Optional closed form for [`TestFunction::hat_cutoff`].
    pub hat_cutoff: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

/// A real test function `φ` with its Fourier transform, normalised to
/// `∫ φ = 2π`, i.e. `φ̂(0) = 1`.
#[derive(Clone)]
pub struct TestFunction {
    kind: TestKind,
    name: String,
    value: RealFn,
    fourier: HatFn,
    q: f64,
    support: Option<(f64, f64)>,
    cutoff: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    factor: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("kind", &self.kind)
            .field("name", &self.name)
            .field("q", &self.q)
            .field("support", &self.support)
            .field("factor", &self.factor)
            .finish()
    }
}

impl TestFunction {
    /// `φ(E) = 2/(E² + 1)`, `φ̂(t) = e^{-|t|}`.
    pub fn cauchy() -> Self {
        Self {
            kind: TestKind::Cauchy,
            name: "cauchy".into(),
            value: Arc::new(|e| 2.0 / (e * e + 1.0)),
            fourier: Arc::new(|t| c64((-t.abs()).exp(), 0.0)),
            q: 2.0,
            support: None,
            cutoff: None,
            factor: 1.0,
        }
    }

    /// `φ(E) = √(2π) e^{-E²/2}`, `φ̂(t) = e^{-t²/2}`.
    pub fn gaussian() -> Self {
        let root = (2.0 * PI).sqrt();
        Self {
            kind: TestKind::Gaussian,
            name: "gaussian".into(),
            value: Arc::new(move |e| root * (-0.5 * e * e).exp()),
            fourier: Arc::new(|t| c64((-0.5 * t * t).exp(), 0.0)),
            q: f64::INFINITY,
            support: None,
            cutoff: None,
            factor: 1.0,
        }
    }

    /// The smooth bump `φ ∝ e^{-1/(1-E²)}` on `(-1, 1)`, with `φ̂` by
    /// quadrature.
    pub fn bump() -> Self {
        let raw = |e: f64| if e.abs() < 1.0 { (-1.0 / (1.0 - e * e)).exp() } else { 0.0 };
        let cfg = QuadConfig { abs_tol: 1e-15, rel_tol: 1e-13, max_panels: 20_000 };
        let mass = integrate_real(raw, -1.0, 1.0, 8, cfg).map(|q| q.value).unwrap_or(f64::NAN);
        let value = move |e: f64| 2.0 * PI * raw(e) / mass;
        let fourier = move |t: f64| {
            let panels = 8 + (t.abs() / 2.0) as usize;
            let half = integrate_real(|e| (e * t).cos() * raw(e), 0.0, 1.0, panels, cfg)
                .map(|q| q.value)
                .unwrap_or(f64::NAN);
            c64(2.0 * half / mass, 0.0)
        };
        Self {
            kind: TestKind::Custom,
            name: "bump".into(),
            value: Arc::new(value),
            fourier: Arc::new(fourier),
            q: f64::INFINITY,
            support: Some((-1.0, 1.0)),
            cutoff: None,
            factor: 1.0,
        }
    }

    /// Builds a custom test function, rescaled so that `φ̂(0) = 1`.
    pub fn custom(spec: CustomSpec) -> Result<Self> {
        let value = spec.value.ok_or_else(|| invalid("custom test function needs φ"))?;
        let fourier = spec.fourier.ok_or_else(|| invalid("custom test function needs φ̂"))?;
        if !(spec.q > 0.0) {
            return Err(invalid("custom test function needs a decay exponent q > 0"));
        }
        let h0 = fourier(0.0).re;
        if !h0.is_finite() || h0 == 0.0 {
            return Err(invalid("custom test function has ∫φ = 0"));
        }
        let s = 1.0 / h0;
        Ok(Self {
            kind: TestKind::Custom,
            name: if spec.name.is_empty() { "custom".into() } else { spec.name },
            value: Arc::new(move |e| s * value(e)),
            fourier: Arc::new(move |t| fourier(t) * s),
            q: spec.q,
            support: spec.support,
            cutoff: spec.hat_cutoff,
            factor: 1.0,
        })
    }

    pub fn kind(&self) -> TestKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn decay_class(&self) -> DecayClass {
        match self.kind {
            TestKind::Cauchy => DecayClass::C1,
            _ => DecayClass::C2,
        }
    }

    pub fn decay_exponent(&self) -> f64 {
        self.q
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    /// Overall multiplier applied by [`TestFunction::scaled`].
    pub fn factor(&self) -> f64 {
        self.factor
    }

    /// `φ(E)`.
    pub fn value(&self, e: f64) -> f64 {
        self.factor * (self.value)(e)
    }

    /// `φ̂(t)`.
    pub fn fourier(&self, t: f64) -> Complex64 {
        (self.fourier)(t) * self.factor
    }

    /// `φ^η(E) = η^{-1} φ(E/η)`.
    pub fn rescaled(&self, e: f64, eta: f64) -> f64 {
        self.value(e / eta) / eta
    }

    /// `λφ`, without renormalising.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.factor *= factor;
        out
    }

    /// A time `T` with `|φ̂(t)| < tol · |φ̂(0)|` for all `t >= T`.
    ///
    /// Custom functions without a closed form are scanned on a unit grid
    /// over doubling windows; this is a heuristic, not a bound.
    pub fn hat_cutoff(&self, tol: f64) -> f64 {
        let tol = tol.clamp(1e-300, 1.0);
        match self.kind {
            TestKind::Cauchy => (1.0 / tol).ln().max(0.0),
            TestKind::Gaussian => (2.0 * (1.0 / tol).ln()).sqrt(),
            TestKind::Custom => {
                if let Some(f) = &self.cutoff {
                    return f(tol);
                }
                let scale = (self.fourier)(0.0).norm();
                let small = |t: f64| (self.fourier)(t).norm() < tol * scale;
                let mut t = 1.0;
                while t < 1e7 {
                    let steps = (t as usize).max(8);
                    let quiet = (0..=steps).all(|k| small(t + t * k as f64 / steps as f64));
                    if quiet {
                        return t;
                    }
                    t *= 2.0;
                }
                t
            }
        }
    }
}
