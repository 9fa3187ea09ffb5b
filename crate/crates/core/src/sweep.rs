//! Monte-Carlo grids over noise, lens strength and pose.

use std::io::Write;

use rayon::prelude::*;

use crate::geometry::Orientation;
use crate::rig::{run_trial, ImageSize, RigError, SyntheticScene, TrialReport};

/// Column order of the sweep CSV.
pub const SWEEP_CSV_HEADER: [&str; 9] = [
    "seed",
    "noise_sigma",
    "k1_scale",
    "roll_gt",
    "pitch_gt",
    "roll_error",
    "pitch_error",
    "residual_z_spread",
    "n_visible",
];

/// A grid of trials. Every cell runs the same `seeds_per_cell` seeds,
/// `base_seed, base_seed + 1, …`, so cells are compared on paired noise.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Intrinsics, scene distances, line sampling and the reference lens.
    pub template: SyntheticScene,
    pub image: ImageSize,
    pub noise_sigmas: Vec<f64>,
    /// Multipliers applied to every coefficient of the template lens.
    pub distortion_scales: Vec<f64>,
    pub poses: Vec<Orientation>,
    pub seeds_per_cell: usize,
    pub base_seed: u64,
}

impl SweepConfig {
    /// Noise levels only, at the template's pose and lens.
    pub fn noise_study(
        template: SyntheticScene,
        noise_sigmas: Vec<f64>,
        seeds_per_cell: usize,
        base_seed: u64,
    ) -> Self {
        Self {
            poses: vec![template.ground_truth],
            template,
            image: ImageSize::default(),
            noise_sigmas,
            distortion_scales: vec![1.0],
            seeds_per_cell,
            base_seed,
        }
    }

    pub fn len(&self) -> usize {
        self.noise_sigmas.len()
            * self.distortion_scales.len()
            * self.poses.len()
            * self.seeds_per_cell
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cell(&self, index: usize) -> (f64, f64, Orientation, u64) {
        let seed_i = index % self.seeds_per_cell;
        let rest = index / self.seeds_per_cell;
        let pose_i = rest % self.poses.len();
        let rest = rest / self.poses.len();
        let scale_i = rest % self.distortion_scales.len();
        let noise_i = rest / self.distortion_scales.len();
        (
            self.noise_sigmas[noise_i],
            self.distortion_scales[scale_i],
            self.poses[pose_i],
            self.base_seed.wrapping_add(seed_i as u64),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub seed: u64,
    pub noise_sigma: f64,
    pub k1_scale: f64,
    pub ground_truth: Orientation,
    pub outcome: Result<TrialReport, RigError>,
}

/// Runs every grid cell × seed. Order is noise-major, then lens scale, then
/// pose, then seed. Failed trials stay in the list.
pub fn sweep(config: &SweepConfig) -> Vec<SweepRecord> {
    (0..config.len())
        .into_par_iter()
        .map(|index| {
            let (noise_sigma, k1_scale, ground_truth, seed) = config.cell(index);
            let outcome = config
                .template
                .distortion
                .scaled(k1_scale)
                .map_err(RigError::from)
                .and_then(|distortion| {
                    let scene = SyntheticScene {
                        ground_truth,
                        distortion,
                        noise_sigma,
                        rng_seed: seed,
                        ..config.template.clone()
                    };
                    run_trial(&scene, config.image)
                });
            SweepRecord {
                seed,
                noise_sigma,
                k1_scale,
                ground_truth,
                outcome,
            }
        })
        .collect()
}

/// Writes one row per record. Failed trials get `NaN` errors and zero
/// visible points.
pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(SWEEP_CSV_HEADER)?;
    for r in records {
        let (roll_error, pitch_error, spread, n_visible) = match &r.outcome {
            Ok(t) => (
                t.roll_error,
                t.pitch_error,
                t.residual_z_spread,
                t.n_visible,
            ),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN, 0),
        };
        writer.write_record([
            r.seed.to_string(),
            r.noise_sigma.to_string(),
            r.k1_scale.to_string(),
            r.ground_truth.roll().to_string(),
            r.ground_truth.pitch().to_string(),
            roll_error.to_string(),
            pitch_error.to_string(),
            spread.to_string(),
            n_visible.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Median absolute errors per noise level, over successful trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSummary {
    pub noise_sigma: f64,
    pub trials: usize,
    pub failures: usize,
    pub median_abs_roll_error: f64,
    pub median_abs_pitch_error: f64,
}

/// Groups records by noise level, in first-seen order.
pub fn summarize_by_noise(records: &[SweepRecord]) -> Vec<NoiseSummary> {
    let mut levels: Vec<f64> = Vec::new();
    for r in records {
        if !levels
            .iter()
            .any(|&s| s.to_bits() == r.noise_sigma.to_bits())
        {
            levels.push(r.noise_sigma);
        }
    }
    levels
        .into_iter()
        .map(|sigma| {
            let group: Vec<&SweepRecord> = records
                .iter()
                .filter(|r| r.noise_sigma.to_bits() == sigma.to_bits())
                .collect();
            let ok: Vec<&TrialReport> = group
                .iter()
                .filter_map(|r| r.outcome.as_ref().ok())
                .collect();
            NoiseSummary {
                noise_sigma: sigma,
                trials: group.len(),
                failures: group.len() - ok.len(),
                median_abs_roll_error: median(ok.iter().map(|t| t.roll_error.abs()).collect()),
                median_abs_pitch_error: median(ok.iter().map(|t| t.pitch_error.abs()).collect()),
            }
        })
        .collect()
}

fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}
