//! The closed-form estimators against scenes rendered with known orientation.

mod common;

use common::*;
use groundline::prelude::*;

fn scene(roll: f64, pitch: f64) -> SyntheticScene {
    SyntheticScene {
        ground_truth: Orientation::new(roll, pitch),
        ..SyntheticScene::desk_default()
    }
}

fn estimate(scene: &SyntheticScene) -> OrientationEstimate {
    let obs = render_line(scene, ImageSize::default()).unwrap();
    estimate_orientation(
        &obs,
        &scene.intrinsics,
        &scene.distortion,
        &scene.constraints,
    )
    .unwrap()
}

#[test]
fn roll_of_rendered_line() {
    let s = scene(0.07, 0.55);
    let obs = render_line(&s, ImageSize::default()).unwrap();
    let px = obs.pixels();
    let k = &s.intrinsics;
    let roll = estimate_roll(normalize(px[0], k), normalize(px[px.len() - 1], k)).unwrap();
    assert!((roll - 0.07).abs() < 1e-10, "{roll}");
}

#[test]
fn pitch_of_rendered_line() {
    let s = scene(0.0, 0.4);
    let est = estimate(&s);
    assert!((est.orientation.pitch() - 0.4).abs() < 1e-10);
    assert_eq!(est.orientation.roll(), 0.0);
}

#[test]
fn noise_free_pose_is_recovered() {
    let est = estimate(&scene(0.05, 0.35));
    assert!((est.orientation.roll() - 0.05).abs() < 1e-9);
    assert!((est.orientation.pitch() - 0.35).abs() < 1e-9);
    assert!(est.residual_z_spread < 1e-9);
    assert!(est.residual_z_bias.abs() < 1e-9);
    assert!(est.warnings.is_empty());
}

#[test]
fn level_camera_line_has_exactly_zero_roll() {
    let est = estimate(&scene(0.0, 0.35));
    assert!(est.orientation.roll().abs() < 1e-12);
}

#[test]
fn distorted_line_is_recovered_after_undistortion() {
    let s = SyntheticScene {
        distortion: DistortionCoefficients::radial(-1e-8).unwrap(),
        ..scene(0.05, 0.45)
    };
    let est = estimate(&s);
    assert!((est.orientation.roll() - 0.05).abs() < 1e-6);
    assert!((est.orientation.pitch() - 0.45).abs() < 1e-6);
}

#[test]
fn interpolated_center_under_distortion() {
    let s = SyntheticScene {
        distortion: DistortionCoefficients::new(-3e-8, 2e-15, 5e-7, -3e-7, 0.0).unwrap(),
        n_points: 401,
        ..scene(0.09, 0.5)
    };
    let obs = render_line(&s, ImageSize::default()).unwrap();
    let c = central_pixel(&obs, &s.intrinsics, &s.distortion).unwrap();
    assert!(c.bracketed);

    // Oracle: the ideal image of the line is straight; intersect it with
    // x' = 0 using the camera-frame endpoints of the full line.
    let pose = Pose::at_origin(s.ground_truth);
    let a = pose.to_camera(WorldPoint::new(-1.0, 2.0, 3.0));
    let b = pose.to_camera(WorldPoint::new(1.0, 2.0, 3.0));
    let (ax, ay) = (a.x / a.z, a.y / a.z);
    let (bx, by) = (b.x / b.z, b.y / b.z);
    let expected_y = ay + (0.0 - ax) / (bx - ax) * (by - ay);
    assert!(c.point.xn.abs() < 1e-15);
    assert!(
        (c.point.yn - expected_y).abs() < 1e-6,
        "{} vs {expected_y}",
        c.point.yn
    );
}

#[test]
fn center_pixel_lands_at_reference_depth() {
    let s = scene(-0.12, 0.7);
    let est = estimate(&s);
    let obs = render_line(&s, ImageSize::default()).unwrap();
    let c = central_pixel(&obs, &s.intrinsics, &s.distortion).unwrap();
    let pixel = s.intrinsics.denormalize(c.point);
    let pt = back_project_to_plane(
        pixel,
        &s.intrinsics,
        &est.orientation.rotation_matrix(),
        2.0,
    )
    .unwrap();
    assert!((pt.z - 3.0).abs() < 1e-9);
}

#[test]
fn perturbed_roll_spreads_depths() {
    let s = scene(0.04, 0.6);
    let obs = render_line(&s, ImageSize::default()).unwrap();
    let base = residual_z_spread(&obs, &s.intrinsics, &s.distortion, &s.ground_truth, 2.0).unwrap();
    assert!(base.spread < 1e-9);
    assert!((base.mean - 3.0).abs() < 1e-9);
    let tilted = Orientation::new(0.05, 0.6);
    let off = residual_z_spread(&obs, &s.intrinsics, &s.distortion, &tilted, 2.0).unwrap();
    assert!(off.spread > base.spread);
}

#[test]
fn random_scenes_within_oracle_tolerance() {
    let mut rng = rng(99);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let (s, obs) = random_visible_scene(&mut rng);
        let est = estimate_orientation(&obs, &s.intrinsics, &s.distortion, &s.constraints).unwrap();
        worst = worst
            .max((est.orientation.roll() - s.ground_truth.roll()).abs())
            .max((est.orientation.pitch() - s.ground_truth.pitch()).abs());
    }
    assert!(worst < 1e-8, "worst angular error {worst}");
}

#[test]
fn noisy_trials_report_errors_without_failing() {
    let mut errors = Vec::new();
    for seed in 0..200 {
        let s = SyntheticScene {
            noise_sigma: 0.5,
            rng_seed: seed,
            ..scene(0.05, 0.6)
        };
        let r = run_trial(&s, ImageSize::default()).unwrap();
        assert!(r.roll_error.is_finite() && r.pitch_error.is_finite());
        assert!(r.n_visible <= s.n_points);
        errors.push(r.pitch_error.abs());
    }
    errors.sort_by(f64::total_cmp);
    println!("sigma=0.5 px: median |pitch error| = {:e} rad", errors[100]);
}
