//! Closed-form roll and pitch from a reference line on the ground plane.
//!
//! The camera sits `c0` above a plane and sees a straight line on that plane,
//! parallel to the scene x axis at forward distance `z0`. Intrinsics and lens
//! are known; roll and pitch are not.
//!
//! * Roll is the image angle of the line, taken from its two extreme points.
//! * Pitch follows from the line's center pixel: the tilt for which that
//!   pixel's ray meets the plane at depth `z0`,
//!   `tan θ = (c0 − z0·y') / (z0 + c0·y')`.
//!
//! The pitch relation holds in the un-rolled image. The center pixel's
//! normalized coordinates are therefore rotated by the estimated roll before
//! the formula is applied (`y' = −sin λ·x'c + cos λ·y'c`). At zero roll this
//! is the raw `y'` of the center.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Vector3;
use thiserror::Error;

use crate::backprojection::{intersect_plane, BackprojectionError, SceneConstraints};
use crate::geometry::{
    normalize, undistort_default, DistortionCoefficients, GeometryError, Intrinsics,
    NormalizedPoint, Orientation, PixelPoint,
};

/// Minimum normalized distance between the two points fed to [`estimate_roll`].
pub const MIN_ROLL_BASELINE: f64 = 1e-9;
/// Minimum pixel distance between the undistorted extreme points.
pub const MIN_EXTREME_SEPARATION_PX: f64 = 1.0;
/// Pitch denominators below this magnitude are unobservable.
pub const PITCH_DENOMINATOR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("reference line needs at least 2 pixels (got {count})")]
    TooFewPoints { count: usize },
    #[error("DegenerateLine: line endpoints are {separation} apart")]
    DegenerateLine { separation: f64 },
    #[error("DegenerateGeometry: pitch denominator z0 + c0·y' = {denominator} vanishes")]
    DegenerateGeometry { denominator: f64 },
    #[error(transparent)]
    Undistort(#[from] GeometryError),
    #[error("NoHorizonIntersection: line pixel {index} does not reach the plane ({source})")]
    NoHorizonIntersection {
        index: usize,
        source: BackprojectionError,
    },
}

/// Pixels sampled along a detected reference line, as observed (distorted).
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceLineObservation {
    pixels: Vec<PixelPoint>,
}

impl ReferenceLineObservation {
    pub fn new(pixels: Vec<PixelPoint>) -> Result<Self, EstimateError> {
        if pixels.len() < 2 {
            return Err(EstimateError::TooFewPoints {
                count: pixels.len(),
            });
        }
        Ok(Self { pixels })
    }

    pub fn pixels(&self) -> &[PixelPoint] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimateWarning {
    /// The observed span does not cross the image-center column; the point
    /// nearest to it stood in for the center.
    CenterNotBracketed { nearest_xn: f64 },
}

impl std::fmt::Display for EstimateWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::CenterNotBracketed { nearest_xn } => write!(
                f,
                "CenterNotBracketed: line does not cross the center column; used nearest point at x'={nearest_xn}"
            ),
        }
    }
}

/// Where the line crosses the image-center column `x' = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralPixel {
    pub point: NormalizedPoint,
    /// False when no pair of points straddles `x' = 0`.
    pub bracketed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrientationEstimate {
    pub orientation: Orientation,
    /// max − min of the back-projected depth over all line pixels.
    pub residual_z_spread: f64,
    /// Mean back-projected depth minus `z0`.
    pub residual_z_bias: f64,
    pub warnings: Vec<EstimateWarning>,
}

/// Depth statistics of a line back-projected onto the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZResidual {
    pub spread: f64,
    pub mean: f64,
}

/// Angle of the line through two normalized points, in `(−π/2, π/2]`.
///
/// The pair is put in a canonical order first, so swapping the arguments
/// yields the identical result.
pub fn estimate_roll(p1: NormalizedPoint, p2: NormalizedPoint) -> Result<f64, EstimateError> {
    let mut dx = p1.xn - p2.xn;
    let mut dy = p1.yn - p2.yn;
    let separation = dx.hypot(dy);
    if separation.is_nan() || separation < MIN_ROLL_BASELINE {
        return Err(EstimateError::DegenerateLine { separation });
    }
    if dx < 0.0 || (dx == 0.0 && dy < 0.0) {
        dx = -dx;
        dy = -dy;
    }
    Ok(wrap_half_turn(dy.atan2(dx)))
}

fn wrap_half_turn(angle: f64) -> f64 {
    if angle > FRAC_PI_2 {
        angle - PI
    } else if angle <= -FRAC_PI_2 {
        angle + PI
    } else {
        angle
    }
}

/// Pitch that places the un-rolled center pixel's ray at depth `z0` on the
/// plane `c0` below the camera.
pub fn estimate_pitch(y0_normalized: f64, sc: &SceneConstraints) -> Result<f64, EstimateError> {
    let (c0, z0) = (sc.c0(), sc.z0());
    let denominator = z0 + c0 * y0_normalized;
    if denominator.is_nan() || denominator.abs() < PITCH_DENOMINATOR_TOLERANCE {
        return Err(EstimateError::DegenerateGeometry { denominator });
    }
    Ok(((c0 - z0 * y0_normalized) / denominator).atan())
}

/// Undistorts and normalizes every observed pixel, then finds the
/// center-column crossing.
pub fn central_pixel(
    obs: &ReferenceLineObservation,
    k: &Intrinsics,
    d: &DistortionCoefficients,
) -> Result<CentralPixel, EstimateError> {
    let normalized = undistort_all(obs, k, d)?.1;
    Ok(center_crossing(&normalized))
}

/// Roll, pitch and depth residuals for one observed reference line.
pub fn estimate_orientation(
    obs: &ReferenceLineObservation,
    k: &Intrinsics,
    d: &DistortionCoefficients,
    sc: &SceneConstraints,
) -> Result<OrientationEstimate, EstimateError> {
    let (ideal, normalized) = undistort_all(obs, k, d)?;

    let (mut lo, mut hi) = (0, 0);
    for (i, p) in ideal.iter().enumerate() {
        if p.u < ideal[lo].u {
            lo = i;
        }
        if p.u > ideal[hi].u {
            hi = i;
        }
    }
    let separation = ideal[lo].distance(&ideal[hi]);
    if separation.is_nan() || separation <= MIN_EXTREME_SEPARATION_PX {
        return Err(EstimateError::DegenerateLine { separation });
    }

    let roll = estimate_roll(normalized[lo], normalized[hi])?;
    let center = center_crossing(&normalized);
    let (sin_roll, cos_roll) = roll.sin_cos();
    let derolled_y = -sin_roll * center.point.xn + cos_roll * center.point.yn;
    let pitch = estimate_pitch(derolled_y, sc)?;

    let orientation = Orientation::new(roll, pitch);
    let residual = depth_residual(&normalized, &orientation, sc.c0())?;

    let mut warnings = Vec::new();
    if !center.bracketed {
        warnings.push(EstimateWarning::CenterNotBracketed {
            nearest_xn: center.point.xn,
        });
    }

    Ok(OrientationEstimate {
        orientation,
        residual_z_spread: residual.spread,
        residual_z_bias: residual.mean - sc.z0(),
        warnings,
    })
}

/// Back-projects every line pixel through `orientation` onto the plane and
/// reports the spread and mean of the resulting depths. A correct orientation
/// puts every point of the line at the same depth.
pub fn residual_z_spread(
    obs: &ReferenceLineObservation,
    k: &Intrinsics,
    d: &DistortionCoefficients,
    orientation: &Orientation,
    c0: f64,
) -> Result<ZResidual, EstimateError> {
    let normalized = undistort_all(obs, k, d)?.1;
    depth_residual(&normalized, orientation, c0)
}

fn undistort_all(
    obs: &ReferenceLineObservation,
    k: &Intrinsics,
    d: &DistortionCoefficients,
) -> Result<(Vec<PixelPoint>, Vec<NormalizedPoint>), EstimateError> {
    let ideal = obs
        .pixels()
        .iter()
        .map(|&p| undistort_default(p, k, d))
        .collect::<Result<Vec<_>, _>>()?;
    let normalized = ideal.iter().map(|&p| normalize(p, k)).collect();
    Ok((ideal, normalized))
}

fn center_crossing(points: &[NormalizedPoint]) -> CentralPixel {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.xn.total_cmp(&b.xn));

    if let Some(&exact) = sorted.iter().find(|p| p.xn == 0.0) {
        return CentralPixel {
            point: exact,
            bracketed: true,
        };
    }
    for pair in sorted.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.xn < 0.0 && b.xn > 0.0 {
            let t = -a.xn / (b.xn - a.xn);
            return CentralPixel {
                point: NormalizedPoint::new(0.0, a.yn + t * (b.yn - a.yn)),
                bracketed: true,
            };
        }
    }
    let nearest = sorted
        .iter()
        .copied()
        .min_by(|a, b| a.xn.abs().total_cmp(&b.xn.abs()))
        .expect("observation holds at least two points");
    CentralPixel {
        point: nearest,
        bracketed: false,
    }
}

fn depth_residual(
    points: &[NormalizedPoint],
    orientation: &Orientation,
    c0: f64,
) -> Result<ZResidual, EstimateError> {
    let rot = orientation.rotation_matrix();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for (index, n) in points.iter().enumerate() {
        let z = intersect_plane(&(rot * Vector3::new(n.xn, n.yn, 1.0)), c0)
            .map_err(|source| EstimateError::NoHorizonIntersection { index, source })?
            .z;
        min = min.min(z);
        max = max.max(z);
        sum += z;
    }
    Ok(ZResidual {
        spread: max - min,
        mean: sum / points.len() as f64,
    })
}
