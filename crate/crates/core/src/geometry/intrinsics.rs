use serde::{Deserialize, Serialize};

use super::InvalidParameter;

/// A position on the image in pixels. `v` increases downward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelPoint {
    pub u: f64,
    pub v: f64,
}

impl PixelPoint {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn distance(&self, other: &PixelPoint) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }
}

/// Image coordinates with the principal point removed and focal lengths
/// divided out; `(xn, yn, 1)` is the camera-frame ray direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedPoint {
    pub xn: f64,
    pub yn: f64,
}

impl NormalizedPoint {
    pub const fn new(xn: f64, yn: f64) -> Self {
        Self { xn, yn }
    }
}

/// Pinhole intrinsics: the upper-triangular camera matrix
///
/// ```text
/// | fx  skew  cx |
/// |  0   fy   cy |
/// |  0    0    1 |
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    skew: f64,
}

impl Intrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, skew: f64) -> Result<Self, InvalidParameter> {
        Ok(Self {
            fx: InvalidParameter::check_positive("fx", fx)?,
            fy: InvalidParameter::check_positive("fy", fy)?,
            cx: InvalidParameter::check_finite("cx", cx)?,
            cy: InvalidParameter::check_finite("cy", cy)?,
            skew: InvalidParameter::check_finite("skew", skew)?,
        })
    }

    /// Skew-free intrinsics.
    pub fn pinhole(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<Self, InvalidParameter> {
        Self::new(fx, fy, cx, cy, 0.0)
    }

    pub fn fx(&self) -> f64 {
        self.fx
    }

    pub fn fy(&self) -> f64 {
        self.fy
    }

    pub fn cx(&self) -> f64 {
        self.cx
    }

    pub fn cy(&self) -> f64 {
        self.cy
    }

    pub fn skew(&self) -> f64 {
        self.skew
    }

    pub fn principal_point(&self) -> PixelPoint {
        PixelPoint::new(self.cx, self.cy)
    }

    pub fn matrix(&self) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::new(
            self.fx, self.skew, self.cx, //
            0.0, self.fy, self.cy, //
            0.0, 0.0, 1.0,
        )
    }

    /// Inverse of [`normalize`]: applies the camera matrix to `(xn, yn, 1)`.
    pub fn denormalize(&self, n: NormalizedPoint) -> PixelPoint {
        PixelPoint::new(
            self.fx * n.xn + self.skew * n.yn + self.cx,
            self.fy * n.yn + self.cy,
        )
    }
}

/// Maps a pixel to normalized image coordinates.
///
/// The camera matrix is upper triangular, so `yn` is solved first and then
/// substituted into the `u` row to remove the skew contribution.
pub fn normalize(p: PixelPoint, k: &Intrinsics) -> NormalizedPoint {
    let yn = (p.v - k.cy) / k.fy;
    let xn = (p.u - k.cx - k.skew * yn) / k.fx;
    NormalizedPoint::new(xn, yn)
}
