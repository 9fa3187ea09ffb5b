//! `groundline` command-line front-end.
//!
//! Exit codes: 0 success, 1 input or config error, 2 domain or numerical
//! error. Angles are degrees on the command line and radians inside.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::config::CameraConfig;
use crate::estimator::{estimate_orientation, ReferenceLineObservation};
use crate::geometry::{project, undistort_default, Orientation, PixelPoint, Pose, WorldPoint};
use crate::rig::{render_line, ImageSize, SyntheticScene};
use crate::sweep::{summarize_by_noise, sweep, write_sweep_csv, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "groundline",
    version,
    about = "Roll/pitch from a ground-plane reference line"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate roll and pitch from observed line pixels.
    Estimate {
        config: PathBuf,
        /// CSV with header `u,v` and at least two rows.
        line: PathBuf,
        /// Result document path (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a synthetic reference line as `u,v` CSV plus a `.truth.json` sidecar.
    Simulate {
        config: PathBuf,
        /// Ground-truth roll, degrees.
        #[arg(long, allow_negative_numbers = true)]
        roll: f64,
        /// Ground-truth pitch, degrees.
        #[arg(long, allow_negative_numbers = true)]
        pitch: f64,
        /// Pixel noise standard deviation.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Points sampled along the line.
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Half-length of the line, meters.
        #[arg(long, default_value_t = 3.0)]
        extent: f64,
        #[arg(long, default_value_t = 1280)]
        width: u32,
        #[arg(long, default_value_t = 720)]
        height: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Project a scene point (meters) to a distorted pixel.
    Project {
        config: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        roll: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        pitch: f64,
        #[arg(allow_negative_numbers = true)]
        x: f64,
        #[arg(allow_negative_numbers = true)]
        y: f64,
        #[arg(allow_negative_numbers = true)]
        z: f64,
    },
    /// Remove lens distortion from one pixel.
    Undistort {
        config: PathBuf,
        #[arg(allow_negative_numbers = true)]
        u: f64,
        #[arg(allow_negative_numbers = true)]
        v: f64,
    },
    /// Monte-Carlo sweep over noise, lens scale and pose; writes the sweep CSV.
    Sweep {
        config: PathBuf,
        /// Noise levels, pixels.
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,1")]
        noise: Vec<f64>,
        /// Multipliers on the configured distortion coefficients.
        #[arg(long = "k1-scale", value_delimiter = ',', default_value = "1")]
        k1_scale: Vec<f64>,
        /// Ground-truth rolls, degrees.
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            default_value = "5"
        )]
        roll: Vec<f64>,
        /// Ground-truth pitches, degrees.
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            default_value = "33.69"
        )]
        pitch: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long, default_value_t = 3.0)]
        extent: f64,
        #[arg(long, default_value_t = 1280)]
        width: u32,
        #[arg(long, default_value_t = 720)]
        height: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// Result document written by `estimate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutput {
    pub roll_deg: f64,
    pub pitch_deg: f64,
    pub roll_rad: f64,
    pub pitch_rad: f64,
    pub residual_z_spread_m: f64,
    pub residual_z_bias_m: f64,
    pub warnings: Vec<String>,
}

/// Ground-truth sidecar written by `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTruth {
    pub roll_deg: f64,
    pub pitch_deg: f64,
    pub roll_rad: f64,
    pub pitch_rad: f64,
    pub noise_sigma_px: f64,
    pub seed: u64,
    pub n_points: usize,
    pub n_visible: usize,
    pub c0_m: f64,
    pub z0_m: f64,
    pub image_width: u32,
    pub image_height: u32,
}

#[derive(Debug, Deserialize)]
struct LineRow {
    u: f64,
    v: f64,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Domain(String),
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Self::Input(e.to_string())
    }

    fn domain(e: impl std::fmt::Display) -> Self {
        Self::Domain(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_DOMAIN
        }
    }
}

fn execute(
    command: Command,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    match command {
        Command::Estimate {
            config,
            line,
            output,
        } => {
            let cfg = load_config(&config)?;
            let obs = read_line_points(&line)?;
            let est = estimate_orientation(&obs, &cfg.intrinsics, &cfg.distortion, &cfg.scene)
                .map_err(Failure::domain)?;
            let doc = EstimateOutput {
                roll_deg: est.orientation.roll().to_degrees(),
                pitch_deg: est.orientation.pitch().to_degrees(),
                roll_rad: est.orientation.roll(),
                pitch_rad: est.orientation.pitch(),
                residual_z_spread_m: est.residual_z_spread,
                residual_z_bias_m: est.residual_z_bias,
                warnings: est.warnings.iter().map(ToString::to_string).collect(),
            };
            let json = serde_json::to_string_pretty(&doc).map_err(Failure::input)?;
            match output {
                Some(path) => std::fs::write(&path, json + "\n").map_err(|e| io_failure(&path, e)),
                None => writeln!(stdout, "{json}").map_err(Failure::input),
            }
        }
        Command::Simulate {
            config,
            roll,
            pitch,
            noise,
            seed,
            points,
            extent,
            width,
            height,
            output,
        } => {
            let cfg = load_config(&config)?;
            let image = ImageSize { width, height };
            let scene = SyntheticScene {
                noise_sigma: noise,
                rng_seed: seed,
                ..scene_from_config(&cfg, Orientation::from_degrees(roll, pitch), points, extent)
            };
            scene.validate().map_err(Failure::input)?;
            let obs = render_line(&scene, image).map_err(Failure::domain)?;

            let mut csv = String::from("u,v\n");
            for p in obs.pixels() {
                csv.push_str(&format!("{},{}\n", p.u, p.v));
            }
            std::fs::write(&output, csv).map_err(|e| io_failure(&output, e))?;

            let truth = SimulationTruth {
                roll_deg: roll,
                pitch_deg: pitch,
                roll_rad: scene.ground_truth.roll(),
                pitch_rad: scene.ground_truth.pitch(),
                noise_sigma_px: noise,
                seed,
                n_points: points,
                n_visible: obs.len(),
                c0_m: cfg.scene.c0(),
                z0_m: cfg.scene.z0(),
                image_width: width,
                image_height: height,
            };
            let sidecar = truth_path(&output);
            let json = serde_json::to_string_pretty(&truth).map_err(Failure::input)?;
            std::fs::write(&sidecar, json + "\n").map_err(|e| io_failure(&sidecar, e))
        }
        Command::Project {
            config,
            roll,
            pitch,
            x,
            y,
            z,
        } => {
            let cfg = load_config(&config)?;
            let pose = Pose::at_origin(Orientation::from_degrees(roll, pitch));
            let p = project(
                WorldPoint::new(x, y, z),
                &cfg.intrinsics,
                &cfg.distortion,
                &pose,
            )
            .map_err(Failure::domain)?;
            writeln!(stdout, "{},{}", p.u, p.v).map_err(Failure::input)
        }
        Command::Undistort { config, u, v } => {
            let cfg = load_config(&config)?;
            let p = undistort_default(PixelPoint::new(u, v), &cfg.intrinsics, &cfg.distortion)
                .map_err(Failure::domain)?;
            writeln!(stdout, "{},{}", p.u, p.v).map_err(Failure::input)
        }
        Command::Sweep {
            config,
            noise,
            k1_scale,
            roll,
            pitch,
            seeds,
            base_seed,
            points,
            extent,
            width,
            height,
            output,
        } => {
            let cfg = load_config(&config)?;
            let template = scene_from_config(&cfg, Orientation::identity(), points, extent);
            template.validate().map_err(Failure::input)?;
            let poses = roll
                .iter()
                .flat_map(|&r| pitch.iter().map(move |&p| Orientation::from_degrees(r, p)))
                .collect();
            let sweep_config = SweepConfig {
                template,
                image: ImageSize { width, height },
                noise_sigmas: noise,
                distortion_scales: k1_scale,
                poses,
                seeds_per_cell: seeds,
                base_seed,
            };
            let records = sweep(&sweep_config);
            for r in &records {
                if let Err(e) = &r.outcome {
                    let _ = writeln!(
                        stderr,
                        "trial seed={} noise={}: {}",
                        r.seed,
                        r.noise_sigma,
                        e.name()
                    );
                }
            }
            let file = File::create(&output).map_err(|e| io_failure(&output, e))?;
            write_sweep_csv(&records, BufWriter::new(file)).map_err(Failure::input)?;
            for s in summarize_by_noise(&records) {
                let _ = writeln!(
                    stderr,
                    "noise={} trials={} failures={} median|roll_err|={:e} median|pitch_err|={:e}",
                    s.noise_sigma,
                    s.trials,
                    s.failures,
                    s.median_abs_roll_error,
                    s.median_abs_pitch_error
                );
            }
            Ok(())
        }
    }
}

fn load_config(path: &Path) -> Result<CameraConfig, Failure> {
    CameraConfig::load(path).map_err(Failure::input)
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn scene_from_config(
    cfg: &CameraConfig,
    truth: Orientation,
    points: usize,
    extent: f64,
) -> SyntheticScene {
    SyntheticScene {
        ground_truth: truth,
        constraints: cfg.scene,
        intrinsics: cfg.intrinsics,
        distortion: cfg.distortion,
        line_x_extent: extent,
        n_points: points,
        noise_sigma: 0.0,
        rng_seed: 0,
    }
}

/// `line.csv` → `line.truth.json`.
pub fn truth_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("truth.json")
}

/// Reads a `u,v` CSV of line pixels.
fn read_line_points(path: &Path) -> Result<ReferenceLineObservation, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let headers = reader.headers().map_err(Failure::input)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["u", "v"] {
        return Err(Failure::Input(format!(
            "{}: expected header \"u,v\", found \"{}\"",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut pixels = Vec::new();
    for (i, row) in reader.deserialize::<LineRow>().enumerate() {
        let row =
            row.map_err(|e| Failure::Input(format!("{} row {}: {e}", path.display(), i + 1)))?;
        if !(row.u.is_finite() && row.v.is_finite()) {
            return Err(Failure::Input(format!(
                "{} row {}: non-finite pixel",
                path.display(),
                i + 1
            )));
        }
        pixels.push(PixelPoint::new(row.u, row.v));
    }
    if pixels.len() < 2 {
        return Err(Failure::Input(format!(
            "{}: line points file needs at least 2 rows (got {})",
            path.display(),
            pixels.len()
        )));
    }
    ReferenceLineObservation::new(pixels).map_err(Failure::input)
}
