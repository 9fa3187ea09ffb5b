//! Synthetic ground truth: a camera at the origin looking at a reference line
//! `{ (x, c0, z0) : |x| ≤ extent }`, rendered through the full forward model.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::backprojection::SceneConstraints;
use crate::estimator::{estimate_orientation, EstimateError, ReferenceLineObservation};
use crate::geometry::{
    project, DistortionCoefficients, GeometryError, Intrinsics, InvalidParameter, Orientation,
    PixelPoint, Pose, WorldPoint,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RigError {
    #[error("invalid scene: {0}")]
    InvalidScene(#[from] InvalidParameter),
    #[error("TooFewVisible: only {visible} line point(s) landed inside the image")]
    TooFewVisible { visible: usize },
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}

impl RigError {
    /// Short variant name, used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Self::InvalidScene(_) => "InvalidScene",
            Self::TooFewVisible { .. } => "TooFewVisible",
            Self::Estimate(EstimateError::TooFewPoints { .. }) => "TooFewPoints",
            Self::Estimate(EstimateError::DegenerateLine { .. }) => "DegenerateLine",
            Self::Estimate(EstimateError::DegenerateGeometry { .. }) => "DegenerateGeometry",
            Self::Estimate(EstimateError::Undistort(_)) => "NonConvergent",
            Self::Estimate(EstimateError::NoHorizonIntersection { .. }) => "NoHorizonIntersection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageSize {
    pub width: u32,
    pub height: u32,
}

impl Default for ImageSize {
    fn default() -> Self {
        Self {
            width: 1280,
            height: 720,
        }
    }
}

impl ImageSize {
    pub fn contains(&self, p: PixelPoint) -> bool {
        p.u >= 0.0 && p.u < f64::from(self.width) && p.v >= 0.0 && p.v < f64::from(self.height)
    }

    pub fn half_diagonal(&self) -> f64 {
        0.5 * f64::from(self.width).hypot(f64::from(self.height))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene {
    pub ground_truth: Orientation,
    pub constraints: SceneConstraints,
    pub intrinsics: Intrinsics,
    pub distortion: DistortionCoefficients,
    /// Half-length of the reference line along x, meters.
    pub line_x_extent: f64,
    pub n_points: usize,
    /// Standard deviation of the pixel noise added after distortion.
    pub noise_sigma: f64,
    pub rng_seed: u64,
}

impl SyntheticScene {
    /// Desk-scale rig: 1000 px focal length for a 1280×720 image, camera 2 m
    /// above the plane, line 3 m ahead and 6 m long, sampled at 101 points.
    /// Pitch aims the optical axis at the line center.
    pub fn desk_default() -> Self {
        Self {
            ground_truth: Orientation::new(0.0, (2.0f64 / 3.0).atan()),
            constraints: SceneConstraints::new(2.0, 3.0).expect("positive"),
            intrinsics: Intrinsics::pinhole(1000.0, 1000.0, 640.0, 360.0).expect("positive"),
            distortion: DistortionCoefficients::ZERO,
            line_x_extent: 3.0,
            n_points: 101,
            noise_sigma: 0.0,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), InvalidParameter> {
        InvalidParameter::check_positive("line_x_extent", self.line_x_extent)?;
        InvalidParameter::check_finite("noise_sigma", self.noise_sigma)?;
        if self.noise_sigma < 0.0 {
            return Err(InvalidParameter {
                name: "noise_sigma",
                requirement: ">= 0",
                value: self.noise_sigma,
            });
        }
        if self.n_points < 2 {
            return Err(InvalidParameter {
                name: "n_points",
                requirement: ">= 2",
                value: self.n_points as f64,
            });
        }
        InvalidParameter::check_finite("roll", self.ground_truth.roll())?;
        InvalidParameter::check_finite("pitch", self.ground_truth.pitch())?;
        Ok(())
    }

    /// Evenly spaced points of the reference line, left to right.
    pub fn line_points(&self) -> impl Iterator<Item = WorldPoint> + '_ {
        let step = 2.0 * self.line_x_extent / (self.n_points - 1) as f64;
        (0..self.n_points).map(move |i| {
            WorldPoint::new(
                -self.line_x_extent + step * i as f64,
                self.constraints.c0(),
                self.constraints.z0(),
            )
        })
    }
}

/// Projects the reference line into the image, adds seeded Gaussian pixel
/// noise and keeps the points that land inside the frame.
pub fn render_line(
    scene: &SyntheticScene,
    image: ImageSize,
) -> Result<ReferenceLineObservation, RigError> {
    scene.validate()?;
    let pose = Pose::at_origin(scene.ground_truth);
    let mut rng = ChaCha8Rng::seed_from_u64(scene.rng_seed);
    let noise = (scene.noise_sigma > 0.0)
        .then(|| Normal::new(0.0, scene.noise_sigma).expect("sigma validated"));

    let mut pixels = Vec::with_capacity(scene.n_points);
    for w in scene.line_points() {
        let mut p = match project(w, &scene.intrinsics, &scene.distortion, &pose) {
            Ok(p) => p,
            Err(GeometryError::BehindCamera { .. }) => continue,
            Err(e @ GeometryError::NonConvergent { .. }) => unreachable!("projection: {e}"),
        };
        if let Some(noise) = &noise {
            p.u += noise.sample(&mut rng);
            p.v += noise.sample(&mut rng);
        }
        if image.contains(p) {
            pixels.push(p);
        }
    }

    if pixels.len() < 2 {
        return Err(RigError::TooFewVisible {
            visible: pixels.len(),
        });
    }
    Ok(ReferenceLineObservation::new(pixels)?)
}

/// Accuracy of one render-and-estimate round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialReport {
    /// Estimated minus true roll, radians.
    pub roll_error: f64,
    /// Estimated minus true pitch, radians.
    pub pitch_error: f64,
    pub residual_z_spread: f64,
    pub n_visible: usize,
    pub seed: u64,
}

pub fn run_trial(scene: &SyntheticScene, image: ImageSize) -> Result<TrialReport, RigError> {
    let obs = render_line(scene, image)?;
    let est = estimate_orientation(
        &obs,
        &scene.intrinsics,
        &scene.distortion,
        &scene.constraints,
    )?;
    Ok(TrialReport {
        roll_error: est.orientation.roll() - scene.ground_truth.roll(),
        pitch_error: est.orientation.pitch() - scene.ground_truth.pitch(),
        residual_z_spread: est.residual_z_spread,
        n_visible: obs.len(),
        seed: scene.rng_seed,
    })
}
