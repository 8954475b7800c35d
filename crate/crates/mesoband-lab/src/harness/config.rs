//! Experiment configuration: six TOML blocks, validated on load.
//!
//! ```toml
//! [geometry]
//! d = 1
//! l = 256
//! w = 8
//!
//! [ensemble]
//! beta = 2
//! seed = 1
//! replicas = 32
//!
//! [window]
//! e1 = 0.0
//! e2 = 0.1
//! eta = 0.2
//!
//! [functions]
//! phi1 = { kind = "cauchy" }
//! phi2 = { kind = "gaussian" }
//! ```
//!
//! `method` and `prediction` are optional. Unknown keys are errors.

use crate::error::{LabError, Result};
use crate::estimator::{Method, TraceMode};
use crate::formats::{load_test_function, ProfileFile};
use crate::formats::profile::{ProfileEntry, ProfileKind};
use mesoband::ensemble::{Beta, DENSE_LIMIT};
use mesoband::kernels::{ExpansionParams, TestFunction};
use mesoband::lattice::{BandProfile, TorusGeometry};
use mesoband::predictor::{Form, TruncationBudget};
use mesoband::window::Window;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: GeometryBlock,
    pub ensemble: EnsembleBlock,
    pub window: WindowBlock,
    pub functions: FunctionsBlock,
    #[serde(default)]
    pub method: MethodBlock,
    #[serde(default)]
    pub prediction: PredictionBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub d: usize,
    pub l: usize,
    pub w: usize,
    #[serde(default)]
    pub profile: ProfileRef,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileRef {
    #[default]
    Step,
    /// Offsets and values listed inline.
    Custom { entries: Vec<ProfileEntry> },
    /// A profile TOML file, relative to the config file.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleBlock {
    pub beta: u8,
    pub seed: u64,
    pub replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowBlock {
    pub e1: f64,
    pub e2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// `η = M^{-ρ}`; ignored when `eta` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
}

fn default_kappa() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionsBlock {
    pub phi1: FunctionSpec,
    pub phi2: FunctionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Cauchy {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    Gaussian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    Bump {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    /// CSV tables, paths relative to the config file.
    Tabulated { values: PathBuf, fourier: PathBuf, q: f64 },
}

impl FunctionSpec {
    pub fn label(&self) -> String {
        match self {
            Self::Cauchy { .. } => "cauchy".into(),
            Self::Gaussian { .. } => "gaussian".into(),
            Self::Bump { .. } => "bump".into(),
            Self::Tabulated { values, .. } => format!("tabulated:{}", values.display()),
        }
    }

    pub fn build(&self, base: &Path) -> Result<TestFunction> {
        let (phi, scale) = match self {
            Self::Cauchy { scale } => (TestFunction::cauchy(), *scale),
            Self::Gaussian { scale } => (TestFunction::gaussian(), *scale),
            Self::Bump { scale } => (TestFunction::bump(), *scale),
            Self::Tabulated { values, fourier, q } => {
                let name = values.file_stem().and_then(|s| s.to_str()).unwrap_or("tabulated");
                let phi = load_test_function(name, File::open(base.join(values))?, File::open(base.join(fourier))?, *q)?;
                (phi, None)
            }
        };
        match scale {
            Some(s) if !(s != 0.0 && s.is_finite()) => Err(LabError::Config(format!("scale must be finite and nonzero, got {s}"))),
            Some(s) => Ok(phi.scaled(s)),
            None => Ok(phi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    ExactDiag,
    Chebyshev,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodBlock {
    pub kind: MethodKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Number of Rademacher probes; exact sweep when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    #[serde(default = "default_cheb_tol")]
    pub tol: f64,
}

fn default_cheb_tol() -> f64 {
    1e-6
}

impl Default for MethodBlock {
    fn default() -> Self {
        Self { kind: MethodKind::ExactDiag, n_max: None, probes: None, tol: default_cheb_tol() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormRequest {
    Auto,
    OmegaZero,
    OmegaLarge,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionBlock {
    #[serde(default = "yes")]
    pub enabled: bool,
    /// Which closed-form regime to evaluate.
    #[serde(default = "auto")]
    pub form: FormRequest,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_coef_tol")]
    pub coef_tol: f64,
    #[serde(default = "default_max_order")]
    pub max_order: usize,
    #[serde(default)]
    pub enforce_mu_cap: bool,
}

fn yes() -> bool {
    true
}
fn auto() -> FormRequest {
    FormRequest::Auto
}
fn default_tau() -> f64 {
    0.05
}
fn default_rel_tol() -> f64 {
    TruncationBudget::default().rel_tol
}
fn default_coef_tol() -> f64 {
    TruncationBudget::default().coef_tol
}
fn default_max_order() -> usize {
    TruncationBudget::default().max_order
}

impl Default for PredictionBlock {
    fn default() -> Self {
        Self {
            enabled: true,
            form: FormRequest::Auto,
            tau: default_tau(),
            rel_tol: default_rel_tol(),
            coef_tol: default_coef_tol(),
            max_order: default_max_order(),
            enforce_mu_cap: false,
        }
    }
}

/// A configuration with every cross-field constraint checked and every
/// object built.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub hash: String,
    pub geometry: TorusGeometry,
    pub beta: Beta,
    pub window: Window,
    pub params: ExpansionParams,
    /// Paired with `window.e1` and `window.e2`, exchanged with the
    /// energies when the config lists them in decreasing order.
    pub phi1: TestFunction,
    pub phi2: TestFunction,
    pub method: Method,
    pub budget: TruncationBudget,
    pub form: Option<Option<Form>>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Hex SHA-256 of the canonical JSON form, truncated to 16 digits.
    pub fn hash(&self) -> Result<String> {
        let bytes = serde_json::to_vec(self)?;
        Ok(Sha256::digest(&bytes)[..8].iter().map(|b| format!("{b:02x}")).collect())
    }

    fn profile(&self, base: &Path) -> Result<BandProfile> {
        let d = self.geometry.d;
        match &self.geometry.profile {
            ProfileRef::Step => Ok(BandProfile::Step),
            ProfileRef::Custom { entries } => ProfileFile {
                kind: ProfileKind::Custom,
                w: self.geometry.w,
                dim: Some(d),
                entries: entries.clone(),
            }
            .to_profile(d),
            ProfileRef::File { path } => {
                let p = ProfileFile::load(&base.join(path))?;
                if p.w != self.geometry.w {
                    return Err(LabError::Config(format!("profile file has w = {} but geometry.w = {}", p.w, self.geometry.w)));
                }
                p.to_profile(d)
            }
        }
    }

    /// Validates and builds. Relative paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<Experiment> {
        let cfg = |m: String| LabError::Config(m);
        let geometry = TorusGeometry::new(self.geometry.d, self.geometry.l, self.geometry.w, self.profile(base)?)
            .map_err(|e| cfg(format!("geometry: {e}")))?;
        let beta = Beta::from_index(self.ensemble.beta).map_err(|e| cfg(format!("ensemble.beta: {e}")))?;
        let wb = &self.window;
        let params = match (wb.eta, wb.rho) {
            (Some(eta), _) => ExpansionParams::from_eta(eta, geometry.mass()),
            (None, Some(rho)) => {
                if !(rho > 0.0 && rho < 1.0 / 3.0) {
                    return Err(cfg(format!("window.rho = {rho} outside (0, 1/3)")));
                }
                ExpansionParams::from_eta(geometry.mass().powf(-rho), geometry.mass())
            }
            (None, None) => return Err(cfg("window needs `eta` or `rho`".into())),
        }
        .map_err(|e| cfg(format!("window: {e}")))?;
        let window = Window::new(wb.e1, wb.e2, params.eta, wb.kappa).map_err(|e| cfg(format!("window: {e}")))?;
        let method = match self.method.kind {
            MethodKind::ExactDiag => {
                if geometry.sites() > DENSE_LIMIT {
                    return Err(cfg(format!("exact diagonalisation needs N <= {DENSE_LIMIT}, got {}", geometry.sites())));
                }
                Method::ExactDiag
            }
            MethodKind::Chebyshev => {
                let n_max = self.method.n_max.ok_or_else(|| cfg("chebyshev needs method.n_max".into()))?;
                if n_max == 0 {
                    return Err(cfg("method.n_max must be at least 1".into()));
                }
                let trace_mode = match self.method.probes {
                    None => TraceMode::Exact,
                    Some(k) if k >= 8 => TraceMode::Probes(k),
                    Some(k) => return Err(cfg(format!("method.probes = {k} < 8"))),
                };
                Method::Chebyshev { n_max, trace_mode, tol: self.method.tol }
            }
        };
        let pb = &self.prediction;
        if !(pb.rel_tol > 0.0 && pb.coef_tol > 0.0 && pb.tau >= 0.0) {
            return Err(cfg("prediction tolerances must be positive".into()));
        }
        let budget = TruncationBudget {
            rel_tol: pb.rel_tol,
            coef_tol: pb.coef_tol,
            max_order: pb.max_order,
            enforce_mu_cap: pb.enforce_mu_cap,
        };
        let form = match pb.form {
            FormRequest::Auto => None,
            FormRequest::OmegaZero => Some(Some(Form::OmegaZero)),
            FormRequest::OmegaLarge => Some(Some(Form::OmegaLarge)),
            FormRequest::None => Some(None),
        };
        let (phi1, phi2) = window.order(self.functions.phi1.build(base)?, self.functions.phi2.build(base)?);
        Ok(Experiment {
            config: self.clone(),
            hash: self.hash()?,
            geometry,
            beta,
            window,
            params,
            phi1,
            phi2,
            method,
            budget,
            form,
        })
    }
}
