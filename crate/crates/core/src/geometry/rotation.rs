//! Rotation builders for the tilted ground-plane camera.
//!
//! The matrices here map a camera-frame ray into the level scene frame
//! (x lateral, y down, z forward). A point `w` in the scene frame reaches the
//! camera frame through the transpose.

use nalgebra::Matrix3;

/// Rotation about the x axis (pitch).
///
/// ```text
/// | 1     0      0   |
/// | 0   cos θ  sin θ |
/// | 0  −sin θ  cos θ |
/// ```
pub fn rotation_x(theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    Matrix3::new(
        1.0, 0.0, 0.0, //
        0.0, c, s, //
        0.0, -s, c,
    )
}

/// Rotation about the z axis (roll), same sign convention as [`rotation_x`].
pub fn rotation_z(lam: f64) -> Matrix3<f64> {
    let (s, c) = lam.sin_cos();
    Matrix3::new(
        c, s, 0.0, //
        -s, c, 0.0, //
        0.0, 0.0, 1.0,
    )
}

/// Pitch then roll: `rotation_x(theta) · rotation_z(lam)`, written out.
///
/// ```text
/// |  cos λ          sin λ          0     |
/// | −sin λ·cos θ    cos λ·cos θ    sin θ |
/// |  sin λ·sin θ   −cos λ·sin θ    cos θ |
/// ```
pub fn rotation_xz(theta: f64, lam: f64) -> Matrix3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sl, cl) = lam.sin_cos();
    Matrix3::new(
        cl,
        sl,
        0.0, //
        -sl * ct,
        cl * ct,
        st, //
        sl * st,
        -cl * st,
        ct,
    )
}

/// Camera orientation relative to the level scene frame. Yaw is carried for
/// completeness but is always zero: a single reference line parallel to the
/// x axis cannot observe it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    roll: f64,
    pitch: f64,
}

impl Orientation {
    /// Angles in radians. Roll turns about the optical axis, pitch tilts the
    /// view down toward the plane.
    pub fn new(roll: f64, pitch: f64) -> Self {
        Self { roll, pitch }
    }

    pub fn from_degrees(roll_deg: f64, pitch_deg: f64) -> Self {
        Self::new(roll_deg.to_radians(), pitch_deg.to_radians())
    }

    pub const fn identity() -> Self {
        Self {
            roll: 0.0,
            pitch: 0.0,
        }
    }

    pub fn roll(&self) -> f64 {
        self.roll
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn yaw(&self) -> f64 {
        0.0
    }

    pub fn is_finite(&self) -> bool {
        self.roll.is_finite() && self.pitch.is_finite()
    }

    /// Camera-to-scene rotation, `rotation_xz(pitch, roll)`.
    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        rotation_xz(self.pitch, self.roll)
    }
}
