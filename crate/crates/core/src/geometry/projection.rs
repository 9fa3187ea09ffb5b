use nalgebra::{Matrix3, Vector3};

use super::{distort, DistortionCoefficients, GeometryError, Intrinsics, Orientation, PixelPoint};

/// A point in the level scene frame, in meters: `x` lateral, `y` down toward
/// the plane, `z` forward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl WorldPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn distance(&self, other: &WorldPoint) -> f64 {
        (self.to_vector() - other.to_vector()).norm()
    }
}

/// Camera extrinsics. A scene point `w` lands at `R·w + t` in the camera
/// frame, where `R` is the transpose of the orientation's camera-to-scene
/// rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub orientation: Orientation,
    pub translation: Vector3<f64>,
}

impl Pose {
    /// Camera at the scene origin.
    pub fn at_origin(orientation: Orientation) -> Self {
        Self {
            orientation,
            translation: Vector3::zeros(),
        }
    }

    /// Scene-to-camera rotation `R` of the `[R | t]` extrinsic matrix.
    pub fn extrinsic_rotation(&self) -> Matrix3<f64> {
        self.orientation.rotation_matrix().transpose()
    }

    pub fn to_camera(&self, w: WorldPoint) -> Vector3<f64> {
        self.extrinsic_rotation() * w.to_vector() + self.translation
    }
}

/// Projects a scene point to a distorted pixel: camera matrix times
/// `[R | t]` times the homogeneous point, perspective divide, then the lens.
pub fn project(
    w: WorldPoint,
    k: &Intrinsics,
    d: &DistortionCoefficients,
    pose: &Pose,
) -> Result<PixelPoint, GeometryError> {
    let homogeneous = k.matrix() * pose.to_camera(w);
    let depth = homogeneous.z;
    if depth <= 0.0 || !depth.is_finite() {
        return Err(GeometryError::BehindCamera { depth });
    }
    let ideal = PixelPoint::new(homogeneous.x / depth, homogeneous.y / depth);
    Ok(distort(ideal, k, d))
}
