//! Seeded generators for the simulated datasets.
//!
//! Every generator draws from SplitMix64 seeded with the caller's 64-bit seed,
//! so output depends only on the arguments and is identical across platforms.
//! Directions are normalized standard-normal vectors.

use rand::Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{DqfError, Result};
use crate::inner_product::PointCloud;

/// Radii of the ball and shell pair used for hole detection.
pub const BALL_RADIUS: f64 = 1.5;
pub const HOLE_RADIUS: f64 = 1.25;
pub const HOLE_DIM: usize = 8;
/// Disc radius and ring bounds; `(DISC_RADIUS, RING_INNER)` has zero density.
pub const DISC_RADIUS: f64 = 1.0;
pub const RING_INNER: f64 = 2.0;
pub const RING_OUTER: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SynthSpec {
    Ball {
        n: usize,
        d: usize,
        radius: f64,
        seed: u64,
    },
    AnnulusShell {
        n: usize,
        d: usize,
        r_in: f64,
        r_out: f64,
        seed: u64,
    },
    /// Labeled ball (label 0) and shell (label 1) with the hole-detection radii.
    BallVsShell {
        n: usize,
        d: usize,
        seed: u64,
    },
    DiscVsRing {
        n: usize,
        seed: u64,
    },
    ParaboloidLift {
        n: usize,
        seed: u64,
    },
    /// Ball inliers (label 0) plus outliers (label 1) on the sphere of twice the radius.
    Contaminated {
        inliers: usize,
        outliers: usize,
        d: usize,
        seed: u64,
    },
    /// Two isotropic Gaussian blobs along the first axis.
    Blobs {
        n: usize,
        d: usize,
        separation: f64,
        seed: u64,
    },
}

impl SynthSpec {
    pub fn generate(&self) -> Result<PointCloud> {
        match *self {
            SynthSpec::Ball { n, d, radius, seed } => gen_uniform_ball(n, d, radius, seed),
            SynthSpec::AnnulusShell {
                n,
                d,
                r_in,
                r_out,
                seed,
            } => gen_annulus_shell(n, d, r_in, r_out, seed),
            SynthSpec::BallVsShell { n, d, seed } => gen_ball_vs_shell(n, d, seed),
            SynthSpec::DiscVsRing { n, seed } => gen_disc_vs_ring(n, seed),
            SynthSpec::ParaboloidLift { n, seed } => lift_paraboloid(&gen_disc_vs_ring(n, seed)?),
            SynthSpec::Contaminated {
                inliers,
                outliers,
                d,
                seed,
            } => gen_contaminated(inliers, outliers, d, seed),
            SynthSpec::Blobs {
                n,
                d,
                separation,
                seed,
            } => gen_gaussian_blobs(n, d, separation, seed),
        }
    }
}

fn check_shape(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(DqfError::usage(format!(
            "need n ≥ 1 and d ≥ 1, got n={n}, d={d}"
        )));
    }
    Ok(())
}

fn check_radius(r: f64, what: &str) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(DqfError::usage(format!("{what} must be positive, got {r}")));
    }
    Ok(())
}

fn direction<R: Rng>(rng: &mut R, d: usize, out: &mut Vec<f64>) {
    loop {
        out.clear();
        out.extend((0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            out.iter_mut().for_each(|v| *v /= norm);
            return;
        }
    }
}

fn push_point<R: Rng>(rng: &mut R, d: usize, norm: f64, dir: &mut Vec<f64>, coords: &mut Vec<f64>) {
    direction(rng, d, dir);
    coords.extend(dir.iter().map(|v| v * norm));
}

fn ball_points<R: Rng>(rng: &mut R, n: usize, d: usize, radius: f64, coords: &mut Vec<f64>) {
    let mut dir = Vec::with_capacity(d);
    for _ in 0..n {
        let u: f64 = rng.random();
        let norm = radius * u.powf(1.0 / d as f64);
        push_point(rng, d, norm, &mut dir, coords);
    }
}

fn shell_points<R: Rng>(
    rng: &mut R,
    n: usize,
    d: usize,
    r_in: f64,
    r_out: f64,
    coords: &mut Vec<f64>,
) {
    let mut dir = Vec::with_capacity(d);
    let p = d as i32;
    let (lo, hi) = (r_in.powi(p), r_out.powi(p));
    for _ in 0..n {
        let u: f64 = rng.random();
        let norm = (lo + u * (hi - lo)).powf(1.0 / d as f64).clamp(r_in, r_out);
        push_point(rng, d, norm, &mut dir, coords);
    }
}

pub fn gen_uniform_ball(n: usize, d: usize, radius: f64, seed: u64) -> Result<PointCloud> {
    check_shape(n, d)?;
    check_radius(radius, "radius")?;
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(n * d);
    ball_points(&mut rng, n, d, radius, &mut coords);
    PointCloud::new(n, d, coords)
}

/// Uniform on `{r_in ≤ ‖x‖ ≤ r_out}` by radial inverse CDF.
pub fn gen_annulus_shell(
    n: usize,
    d: usize,
    r_in: f64,
    r_out: f64,
    seed: u64,
) -> Result<PointCloud> {
    check_shape(n, d)?;
    check_radius(r_in, "inner radius")?;
    check_radius(r_out, "outer radius")?;
    if r_in >= r_out {
        return Err(DqfError::usage(format!(
            "need r_in < r_out, got {r_in} ≥ {r_out}"
        )));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(n * d);
    shell_points(&mut rng, n, d, r_in, r_out, &mut coords);
    PointCloud::new(n, d, coords)
}

/// `n` ball points then `n` shell points, sharing one generator stream.
pub fn gen_ball_vs_shell(n: usize, d: usize, seed: u64) -> Result<PointCloud> {
    check_shape(n, d)?;
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(2 * n * d);
    ball_points(&mut rng, n, d, BALL_RADIUS, &mut coords);
    shell_points(&mut rng, n, d, HOLE_RADIUS, BALL_RADIUS, &mut coords);
    let labels = [0, 1]
        .iter()
        .flat_map(|&c| std::iter::repeat_n(c, n))
        .collect();
    PointCloud::new(2 * n, d, coords)?.with_labels(labels)
}

/// Class 0 uniform on the unit disc, class 1 uniform on the ring `[2, 3]`.
pub fn gen_disc_vs_ring(n: usize, seed: u64) -> Result<PointCloud> {
    if n < 2 {
        return Err(DqfError::usage(format!(
            "need at least 2 points per class, got {n}"
        )));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(4 * n);
    ball_points(&mut rng, n, 2, DISC_RADIUS, &mut coords);
    shell_points(&mut rng, n, 2, RING_INNER, RING_OUTER, &mut coords);
    let labels = [0, 1]
        .iter()
        .flat_map(|&c| std::iter::repeat_n(c, n))
        .collect();
    PointCloud::new(2 * n, 2, coords)?.with_labels(labels)
}

/// Appends `x1² + x2²` as a third coordinate.
pub fn lift_paraboloid(cloud: &PointCloud) -> Result<PointCloud> {
    if cloud.dim() != 2 {
        return Err(DqfError::usage(format!(
            "paraboloid lift expects 2-D points, got d={}",
            cloud.dim()
        )));
    }
    cloud.map_rows(3, |x, out| {
        out.extend_from_slice(x);
        out.push(x[0] * x[0] + x[1] * x[1]);
    })
}

/// Inliers uniform in the unit ball, outliers uniform on the sphere of radius 2.
pub fn gen_contaminated(
    inliers: usize,
    outliers: usize,
    d: usize,
    seed: u64,
) -> Result<PointCloud> {
    check_shape(inliers + outliers, d)?;
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut coords = Vec::with_capacity((inliers + outliers) * d);
    ball_points(&mut rng, inliers, d, 1.0, &mut coords);
    let mut dir = Vec::with_capacity(d);
    for _ in 0..outliers {
        push_point(&mut rng, d, 2.0, &mut dir, &mut coords);
    }
    let labels = std::iter::repeat_n(0, inliers)
        .chain(std::iter::repeat_n(1, outliers))
        .collect();
    PointCloud::new(inliers + outliers, d, coords)?.with_labels(labels)
}

/// `n` standard normal points per class; class 1 is shifted by `separation`
/// along the first axis.
pub fn gen_gaussian_blobs(n: usize, d: usize, separation: f64, seed: u64) -> Result<PointCloud> {
    check_shape(n, d)?;
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(2 * n * d);
    for class in 0..2 {
        for _ in 0..n {
            for a in 0..d {
                let v: f64 = rng.sample(StandardNormal);
                coords.push(if a == 0 {
                    v + class as f64 * separation
                } else {
                    v
                });
            }
        }
    }
    let labels = [0, 1]
        .iter()
        .flat_map(|&c| std::iter::repeat_n(c, n))
        .collect();
    PointCloud::new(2 * n, d, coords)?.with_labels(labels)
}
