//! Camera geometry for a partially calibrated camera looking at a ground
//! plane: pinhole projection with Brown-Conrady distortion, ray/plane
//! back-projection, and closed-form roll and pitch from a single reference
//! line at known height and distance.
//!
//! ```
//! use groundline::prelude::*;
//!
//! let k = Intrinsics::pinhole(1000.0, 1000.0, 640.0, 360.0)?;
//! let scene = SceneConstraints::new(2.0, 3.0)?;
//! let truth = Orientation::new(0.05, 0.6);
//!
//! // Render the line 3 m ahead, then recover the orientation from pixels.
//! let pose = Pose::at_origin(truth);
//! let pixels = (-10..=10)
//!     .map(|i| project(WorldPoint::new(0.2 * i as f64, 2.0, 3.0), &k, &DistortionCoefficients::ZERO, &pose))
//!     .collect::<Result<Vec<_>, _>>()?;
//! let obs = ReferenceLineObservation::new(pixels)?;
//! let est = estimate_orientation(&obs, &k, &DistortionCoefficients::ZERO, &scene)?;
//!
//! assert!((est.orientation.roll() - 0.05).abs() < 1e-12);
//! assert!((est.orientation.pitch() - 0.6).abs() < 1e-12);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod backprojection;
pub mod cli;
pub mod config;
pub mod estimator;
pub mod geometry;
pub mod rig;
pub mod sweep;

pub mod prelude {
    pub use crate::backprojection::{
        back_project_to_plane, intersect_plane, inverse_ray, undistort_then_back_project,
        BackprojectionError, PlanePoint, SceneConstraints,
    };
    pub use crate::estimator::{
        central_pixel, estimate_orientation, estimate_pitch, estimate_roll, residual_z_spread,
        EstimateError, EstimateWarning, OrientationEstimate, ReferenceLineObservation,
    };
    pub use crate::geometry::{
        distort, normalize, project, rotation_x, rotation_xz, rotation_z, undistort,
        undistort_default, DistortionCoefficients, GeometryError, Intrinsics, NormalizedPoint,
        Orientation, PixelPoint, Pose, WorldPoint,
    };
    pub use crate::rig::{
        render_line, run_trial, ImageSize, RigError, SyntheticScene, TrialReport,
    };
    pub use crate::sweep::{sweep, write_sweep_csv, SweepConfig, SweepRecord};
}

// Guide chapters under book/src compile as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/camera-model.md")]
    mod camera_model {}
    #[doc = include_str!("../../../book/src/back-projection.md")]
    mod back_projection {}
    #[doc = include_str!("../../../book/src/orientation.md")]
    mod orientation {}
    #[doc = include_str!("../../../book/src/synthetic-rig.md")]
    mod synthetic_rig {}
}
