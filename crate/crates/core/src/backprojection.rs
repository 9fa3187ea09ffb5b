//! Pixel → plane: cast the ray through a pixel and intersect it with the
//! horizontal plane `y = c0` below the camera.
//!
//! Rotations passed here are camera-to-scene (see [`crate::geometry::Orientation::rotation_matrix`]).
//! A ray with positive `y` descends toward the plane.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::geometry::{
    normalize, undistort_default, DistortionCoefficients, GeometryError, Intrinsics,
    InvalidParameter, PixelPoint,
};

/// Rays whose vertical component is below this magnitude are treated as
/// parallel to the plane.
pub const HORIZON_TOLERANCE: f64 = 1e-12;

/// Known scene distances, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneConstraints {
    c0: f64,
    z0: f64,
}

impl SceneConstraints {
    /// `c0` is the camera height above the plane, `z0` the forward distance
    /// to the reference line.
    pub fn new(c0: f64, z0: f64) -> Result<Self, InvalidParameter> {
        Ok(Self {
            c0: InvalidParameter::check_positive("c0", c0)?,
            z0: InvalidParameter::check_positive("z0", z0)?,
        })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }
}

/// A point on the plane. `y` is always the plane height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackprojectionError {
    #[error("RayParallelToPlane: ray vertical component {y} is within the horizon tolerance")]
    RayParallelToPlane { y: f64 },
    #[error("RayAwayFromPlane: ray vertical component {y} points above the horizon")]
    RayAwayFromPlane { y: f64 },
    #[error(transparent)]
    Undistort(#[from] GeometryError),
}

/// Scene-frame direction of the ray through an undistorted pixel:
/// `rot · (xn, yn, 1)`.
pub fn inverse_ray(p: PixelPoint, k: &Intrinsics, rot: &Matrix3<f64>) -> Vector3<f64> {
    let n = normalize(p, k);
    rot * Vector3::new(n.xn, n.yn, 1.0)
}

/// Scales `ray` so that its `y` component equals `c0`.
pub fn intersect_plane(ray: &Vector3<f64>, c0: f64) -> Result<PlanePoint, BackprojectionError> {
    let y = ray.y;
    if y.abs() < HORIZON_TOLERANCE {
        return Err(BackprojectionError::RayParallelToPlane { y });
    }
    if y < 0.0 {
        return Err(BackprojectionError::RayAwayFromPlane { y });
    }
    let scale = c0 / y;
    Ok(PlanePoint {
        x: ray.x * scale,
        y: c0,
        z: ray.z * scale,
    })
}

/// Back-projects an undistorted pixel onto the plane `c0` below the camera.
pub fn back_project_to_plane(
    p: PixelPoint,
    k: &Intrinsics,
    rot: &Matrix3<f64>,
    c0: f64,
) -> Result<PlanePoint, BackprojectionError> {
    intersect_plane(&inverse_ray(p, k, rot), c0)
}

/// Removes lens distortion from an observed pixel, then back-projects it.
pub fn undistort_then_back_project(
    p: PixelPoint,
    k: &Intrinsics,
    d: &DistortionCoefficients,
    rot: &Matrix3<f64>,
    c0: f64,
) -> Result<PlanePoint, BackprojectionError> {
    let ideal = undistort_default(p, k, d)?;
    back_project_to_plane(ideal, k, rot, c0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{project, rotation_x, rotation_xz, Orientation, Pose, WorldPoint};
    use std::f64::consts::FRAC_PI_4;

    fn k() -> Intrinsics {
        Intrinsics::pinhole(1000.0, 900.0, 640.0, 360.0).unwrap()
    }

    #[test]
    fn optical_axis_ray() {
        let ray = inverse_ray(k().principal_point(), &k(), &Matrix3::identity());
        assert_eq!(ray, Vector3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn pitched_optical_axis_ray() {
        let theta: f64 = 0.37;
        let ray = inverse_ray(k().principal_point(), &k(), &rotation_x(theta));
        assert!((ray - Vector3::new(0.0, theta.sin(), theta.cos())).norm() < 1e-15);
    }

    #[test]
    fn inverse_ray_undoes_rotation() {
        let rot = rotation_xz(0.61, -0.13);
        let p = PixelPoint::new(123.0, 654.0);
        let n = normalize(p, &k());
        let back = rot.transpose() * inverse_ray(p, &k(), &rot);
        assert!((back - Vector3::new(n.xn, n.yn, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn forty_five_degrees_down() {
        let pt = back_project_to_plane(k().principal_point(), &k(), &rotation_x(FRAC_PI_4), 2.0)
            .unwrap();
        assert!(pt.x.abs() < 1e-15);
        assert_eq!(pt.y, 2.0);
        assert!((pt.z - 2.0).abs() < 1e-12);
    }

    #[test]
    fn level_optical_axis_never_meets_plane() {
        let err = back_project_to_plane(k().principal_point(), &k(), &Matrix3::identity(), 2.0)
            .unwrap_err();
        assert!(matches!(
            err,
            BackprojectionError::RayParallelToPlane { .. }
        ));
    }

    #[test]
    fn pixel_above_horizon() {
        let above = PixelPoint::new(640.0, 100.0);
        let err = back_project_to_plane(above, &k(), &Matrix3::identity(), 2.0).unwrap_err();
        assert!(matches!(err, BackprojectionError::RayAwayFromPlane { .. }));
    }

    #[test]
    fn zero_lens_matches_plain_back_projection() {
        let rot = rotation_xz(0.5, 0.05);
        let p = PixelPoint::new(300.0, 500.0);
        assert_eq!(
            undistort_then_back_project(p, &k(), &DistortionCoefficients::ZERO, &rot, 1.5),
            back_project_to_plane(p, &k(), &rot, 1.5)
        );
    }

    #[test]
    fn distorted_pixel_above_horizon() {
        // A scene point above the camera's horizon still projects in front of
        // the camera, but its ray points away from the plane.
        let d = DistortionCoefficients::new(5e-8, 0.0, 1e-6, 0.0, 0.0).unwrap();
        let orientation = Orientation::new(0.02, 0.1);
        let pose = Pose::at_origin(orientation);
        let pixel = project(WorldPoint::new(0.3, -0.5, 4.0), &k(), &d, &pose).unwrap();
        let err = undistort_then_back_project(pixel, &k(), &d, &orientation.rotation_matrix(), 2.0)
            .unwrap_err();
        assert!(matches!(err, BackprojectionError::RayAwayFromPlane { .. }));
    }

    #[test]
    fn ray_scale_does_not_move_intersection() {
        let ray = inverse_ray(PixelPoint::new(800.0, 600.0), &k(), &rotation_xz(0.4, 0.1));
        let base = intersect_plane(&ray, 2.0).unwrap();
        for s in [1e-3, 0.5, 7.0, 1e3] {
            let scaled = intersect_plane(&(ray * s), 2.0).unwrap();
            assert!((scaled.x - base.x).abs() < 1e-12);
            assert!((scaled.z - base.z).abs() < 1e-12);
            assert_eq!(scaled.y, 2.0);
        }
    }

    #[test]
    fn rejects_non_positive_constraints() {
        assert_eq!(SceneConstraints::new(0.0, 3.0).unwrap_err().name, "c0");
        assert_eq!(SceneConstraints::new(2.0, -3.0).unwrap_err().name, "z0");
    }
}
