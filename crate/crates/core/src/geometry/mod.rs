//! Forward camera model.
//!
//! Pixels follow the usual image convention: `u` grows to the right, `v`
//! grows downward. Camera-frame axes match that: `x` lateral, `y` down toward
//! the observed plane, `z` along the optical axis.

mod distortion;
mod intrinsics;
mod projection;
mod rotation;

pub use distortion::{
    distort, undistort, undistort_default, DistortionCoefficients, DEFAULT_UNDISTORT_MAX_ITER,
    DEFAULT_UNDISTORT_TOL,
};
pub use intrinsics::{normalize, Intrinsics, NormalizedPoint, PixelPoint};
pub use projection::{project, Pose, WorldPoint};
pub use rotation::{rotation_x, rotation_xz, rotation_z, Orientation};

use thiserror::Error;

/// A model parameter that violates its invariant.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{name} must be {requirement} (got {value})")]
pub struct InvalidParameter {
    pub name: &'static str,
    pub requirement: &'static str,
    pub value: f64,
}

impl InvalidParameter {
    pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64, Self> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Self {
                name,
                requirement: "finite",
                value,
            })
        }
    }

    pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64, Self> {
        if value.is_finite() && value > 0.0 {
            Ok(value)
        } else {
            Err(Self {
                name,
                requirement: "finite and > 0",
                value,
            })
        }
    }
}

/// Failures of the forward model and its inverse.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("BehindCamera: point has camera depth {depth} <= 0")]
    BehindCamera { depth: f64 },
    #[error("NonConvergent: undistortion stopped after {iterations} iterations with residual {residual} px")]
    NonConvergent { iterations: usize, residual: f64 },
}
