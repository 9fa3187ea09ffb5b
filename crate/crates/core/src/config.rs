//! Camera configuration file.
//!
//! ```toml
//! [intrinsics]
//! fx = 1000.0
//! fy = 1000.0
//! cx = 640.0
//! cy = 360.0
//! skew = 0.0        # optional
//!
//! [distortion]      # optional table; missing coefficients are 0
//! k1 = 0.0
//! k2 = 0.0
//! p1 = 0.0
//! p2 = 0.0
//! k3 = 0.0
//!
//! [scene]
//! c0 = 2.0          # camera height above the plane, m
//! z0 = 3.0          # forward distance to the reference line, m
//! ```
//!
//! Unknown keys are rejected so that a misspelled coefficient never silently
//! becomes zero.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backprojection::SceneConstraints;
use crate::geometry::{DistortionCoefficients, Intrinsics, InvalidParameter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraConfigFile {
    pub intrinsics: IntrinsicsSection,
    #[serde(default)]
    pub distortion: DistortionSection,
    pub scene: SceneSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntrinsicsSection {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    #[serde(default)]
    pub skew: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistortionSection {
    pub k1: f64,
    pub k2: f64,
    pub p1: f64,
    pub p2: f64,
    pub k3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSection {
    pub c0: f64,
    pub z0: f64,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invariant violation: {section}.{source}")]
    Invalid {
        section: &'static str,
        source: InvalidParameter,
    },
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraConfig {
    pub intrinsics: Intrinsics,
    pub distortion: DistortionCoefficients,
    pub scene: SceneConstraints,
}

impl CameraConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str::<CameraConfigFile>(text)?.validate()
    }
}

impl CameraConfigFile {
    pub fn validate(&self) -> Result<CameraConfig, ConfigError> {
        let invalid = |section| move |source| ConfigError::Invalid { section, source };
        let i = &self.intrinsics;
        let d = &self.distortion;
        Ok(CameraConfig {
            intrinsics: Intrinsics::new(i.fx, i.fy, i.cx, i.cy, i.skew)
                .map_err(invalid("intrinsics"))?,
            distortion: DistortionCoefficients::new(d.k1, d.k2, d.p1, d.p2, d.k3)
                .map_err(invalid("distortion"))?,
            scene: SceneConstraints::new(self.scene.c0, self.scene.z0).map_err(invalid("scene"))?,
        })
    }
}
