//! Depth quantile functions: the quantiles of `depth(S)` for a random tip
//! offset `S ~ Uniform[−L, L]`.

use serde::{Deserialize, Serialize};

use crate::depth::{interval_from_offsets, DepthProfile};
use crate::error::{DqfError, Result};

/// Default multiplicative margin on the largest entry threshold.
pub const DEFAULT_MARGIN: f64 = 1.1;
/// Default number of grid points `δ_m = m/M`.
pub const DEFAULT_GRID: usize = 100;
/// Sublevel masses within this distance of a probability level count as reaching it.
pub const MASS_EPS: f64 = 1e-12;

/// Symmetric uniform tip distribution on `[−half_width, half_width]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TipDistribution {
    pub half_width: f64,
    pub margin: f64,
}

impl TipDistribution {
    pub fn uniform(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(DqfError::usage(format!(
                "tip support half-width must be positive and finite, got {half_width}"
            )));
        }
        Ok(TipDistribution {
            half_width,
            margin: 1.0,
        })
    }

    pub fn density(&self) -> f64 {
        0.5 / self.half_width
    }

    /// Mass of `[lo, hi] ∩ [−L, L]`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        let l = self.half_width;
        ((hi.min(l) - lo.max(-l)) / (2.0 * l)).clamp(0.0, 1.0)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = TipDistribution::uniform(self.half_width * factor)?;
        out.margin = self.margin;
        Ok(out)
    }
}

/// One support shared by every pair: `margin × max reach`.
pub fn derive_support<I>(reaches: I, margin: f64) -> Result<TipDistribution>
where
    I: IntoIterator<Item = f64>,
{
    if !margin.is_finite() || margin < 1.0 {
        return Err(DqfError::usage(format!(
            "support margin must be ≥ 1, got {margin}"
        )));
    }
    let reach = reaches.into_iter().fold(f64::NAN, f64::max);
    if reach.is_nan() || reach <= 0.0 {
        return Err(DqfError::data(
            "cannot derive a tip support from zero reach",
        ));
    }
    let mut g = TipDistribution::uniform(margin * reach)?;
    g.margin = margin;
    Ok(g)
}

/// Evaluation grid `δ_m = m/M`, `m = 1..=M`.
pub fn delta_grid(size: usize) -> Vec<f64> {
    (1..=size).map(|m| m as f64 / size as f64).collect()
}

/// Left-continuous nondecreasing step function on `(0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthQuantileFunction {
    pub pair: (usize, usize),
    /// `(δ_r, q_r)` with increasing `δ_r`: the function equals `q_r` on
    /// `(δ_{r−1}, δ_r]`. The last `δ_r` is 1.
    pub breakpoints: Vec<(f64, f64)>,
    pub grid_values: Vec<f64>,
    /// Depth denominator; unnormalized values are multiples of `1/n_total`.
    pub n_total: usize,
    /// The support did not cover every entry threshold.
    pub support_truncated: bool,
}

impl DepthQuantileFunction {
    pub fn eval(&self, delta: f64) -> f64 {
        let r = self
            .breakpoints
            .partition_point(|&(mass, _)| mass < delta - MASS_EPS)
            .min(self.breakpoints.len() - 1);
        self.breakpoints[r].1
    }

    /// Value at `δ = 1`.
    pub fn at_one(&self) -> f64 {
        self.breakpoints.last().map_or(0.0, |b| b.1)
    }

    pub fn grid_size(&self) -> usize {
        self.grid_values.len()
    }

    /// Grid values as integer depth counts (exact for unnormalized functions).
    pub fn grid_counts(&self) -> impl Iterator<Item = u64> + '_ {
        let n = self.n_total as f64;
        self.grid_values.iter().map(move |v| (v * n).round() as u64)
    }
}

/// Sublevel interval `{s : depth(s) ≤ t}` for a real depth level.
pub fn sublevel_interval(profile: &DepthProfile, t: f64) -> Option<(f64, f64)> {
    if t < 0.0 {
        return None;
    }
    let count = (t * profile.n_total as f64 + 1e-9).floor();
    let max = profile.max_count();
    if count >= max as f64 {
        return Some((f64::NEG_INFINITY, f64::INFINITY));
    }
    profile.sublevel_counts(count as u32)
}

pub fn build_dqf(
    profile: &DepthProfile,
    g: &TipDistribution,
    grid_size: usize,
) -> DepthQuantileFunction {
    let n = profile.n_total as f64;
    let max = profile.max_count();
    let neg = profile.neg.exceed_offsets(max);
    let pos = profile.pos.exceed_offsets(max);

    let mut breakpoints: Vec<(f64, f64)> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for t in 0..=max {
        let mass = match interval_from_offsets(neg[t as usize], pos[t as usize]) {
            Some((lo, hi)) => g.mass(lo, hi),
            None => 0.0,
        };
        if mass > best + MASS_EPS {
            best = mass;
            breakpoints.push((mass, t as f64 / n));
        }
    }
    // the top level's sublevel set is the whole line
    if let Some(last) = breakpoints.last_mut() {
        last.0 = 1.0;
    }

    let mut grid_values = Vec::with_capacity(grid_size);
    let mut r = 0;
    for m in 1..=grid_size {
        let delta = m as f64 / grid_size as f64;
        while r + 1 < breakpoints.len() && breakpoints[r].0 < delta - MASS_EPS {
            r += 1;
        }
        grid_values.push(breakpoints[r].1);
    }

    DepthQuantileFunction {
        pair: profile.pair,
        breakpoints,
        grid_values,
        n_total: profile.n_total,
        support_truncated: profile.max_reach > g.half_width,
    }
}

/// Divides by the value at `δ = 1`; the zero function stays zero.
pub fn normalize_dqf(f: &DepthQuantileFunction) -> DepthQuantileFunction {
    let top = f.at_one();
    let scale = |v: f64| if top > 0.0 { v / top } else { 0.0 };
    DepthQuantileFunction {
        pair: f.pair,
        breakpoints: f.breakpoints.iter().map(|&(d, v)| (d, scale(v))).collect(),
        grid_values: f.grid_values.iter().map(|&v| scale(v)).collect(),
        n_total: f.n_total,
        support_truncated: f.support_truncated,
    }
}
