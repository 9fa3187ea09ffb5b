#![allow(dead_code)]

use groundline::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    Uniform::new_inclusive(lo, hi).unwrap().sample(rng)
}

pub fn desk_intrinsics() -> Intrinsics {
    Intrinsics::pinhole(1000.0, 1000.0, 640.0, 360.0).unwrap()
}

/// Draws roll ∈ [−15°, 15°], pitch ∈ [5°, 60°], c0 ∈ [0.5, 5] m and
/// z0 ∈ [1, 10] m until the line is visible in a 1280×720 frame.
pub fn random_visible_scene(rng: &mut ChaCha8Rng) -> (SyntheticScene, ReferenceLineObservation) {
    loop {
        let mut scene = SyntheticScene::desk_default();
        scene.ground_truth =
            Orientation::from_degrees(uniform(rng, -15.0, 15.0), uniform(rng, 5.0, 60.0));
        scene.constraints =
            SceneConstraints::new(uniform(rng, 0.5, 5.0), uniform(rng, 1.0, 10.0)).unwrap();
        if let Ok(obs) = render_line(&scene, ImageSize::default()) {
            if obs.len() >= 5 {
                return (scene, obs);
            }
        }
    }
}

/// Random point on the plane `c0` below the camera whose ideal and distorted
/// pixels both fall inside the frame under `pose`. Points whose ideal pixel
/// is far outside can be folded back into view by a strong lens, where the
/// inverse is not unique.
pub fn random_visible_plane_point(
    rng: &mut ChaCha8Rng,
    k: &Intrinsics,
    d: &DistortionCoefficients,
    pose: &Pose,
    c0: f64,
) -> (WorldPoint, PixelPoint) {
    let image = ImageSize::default();
    loop {
        let w = WorldPoint::new(uniform(rng, -15.0, 15.0), c0, uniform(rng, 0.3, 30.0));
        let ideal = project(w, k, &DistortionCoefficients::ZERO, pose);
        let observed = project(w, k, d, pose);
        if let (Ok(ideal), Ok(p)) = (ideal, observed) {
            if image.contains(ideal) && image.contains(p) {
                return (w, p);
            }
        }
    }
}
