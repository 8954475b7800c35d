//! Band profiles as TOML.
//!
//! ```toml
//! kind = "custom"
//! w = 2
//! dim = 1
//!
//! [[entry]]
//! offset = [1]
//! value = 1.0
//! ```

use crate::error::{LabError, Result};
use mesoband::lattice::{BandProfile, CustomProfile};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Step,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileEntry {
    pub offset: Vec<i64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub kind: ProfileKind,
    pub w: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, rename = "entry", skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<ProfileEntry>,
}

impl ProfileFile {
    pub fn parse(text: &str) -> Result<Self> {
        let p: Self = toml::from_str(text)?;
        match p.kind {
            ProfileKind::Step if !p.entries.is_empty() => {
                Err(LabError::format("profile", "a step profile takes no entries"))
            }
            ProfileKind::Custom if p.dim.is_none() => Err(LabError::format("profile", "a custom profile needs `dim`")),
            _ => Ok(p),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_profile(profile: &BandProfile, w: usize) -> Self {
        match profile {
            BandProfile::Step => Self { kind: ProfileKind::Step, w, dim: None, entries: Vec::new() },
            BandProfile::Custom(c) => Self {
                kind: ProfileKind::Custom,
                w,
                dim: c.entries().first().map(|e| e.0.len()),
                entries: c.entries().iter().map(|(o, v)| ProfileEntry { offset: o.clone(), value: *v }).collect(),
            },
        }
    }

    /// The profile for a `d`-dimensional torus.
    pub fn to_profile(&self, d: usize) -> Result<BandProfile> {
        match self.kind {
            ProfileKind::Step => Ok(BandProfile::Step),
            ProfileKind::Custom => {
                if self.dim != Some(d) {
                    return Err(LabError::format("profile", format!("declared dim {:?} but the torus has d = {d}", self.dim)));
                }
                let entries = self.entries.iter().map(|e| (e.offset.clone(), e.value)).collect();
                Ok(BandProfile::Custom(CustomProfile::new(d, entries)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mesoband::lattice::TorusGeometry;

    #[test]
    fn custom_round_trip() {
        let text = "kind = \"custom\"\nw = 2\ndim = 1\n\n[[entry]]\noffset = [-1]\nvalue = 1.5\n\n[[entry]]\noffset = [1]\nvalue = 1.5\n";
        let p = ProfileFile::parse(text).unwrap();
        let prof = p.to_profile(1).unwrap();
        let g = TorusGeometry::new(1, 16, 2, prof.clone()).unwrap();
        assert_eq!(g.mass(), 3.0);
        let back = ProfileFile::from_profile(&prof, 2);
        assert_eq!(ProfileFile::parse(&back.to_toml().unwrap()).unwrap(), p);
    }

    #[test]
    fn rejects_unknown_keys_and_odd_profiles() {
        assert!(ProfileFile::parse("kind = \"step\"\nw = 2\ncolour = 1\n").is_err());
        let odd = "kind = \"custom\"\nw = 2\ndim = 1\n[[entry]]\noffset = [1]\nvalue = 1.0\n";
        assert!(ProfileFile::parse(odd).unwrap().to_profile(1).is_err());
        assert!(ProfileFile::parse("kind = \"custom\"\nw = 2\n").is_err());
    }
}
