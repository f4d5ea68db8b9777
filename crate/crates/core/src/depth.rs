//! Exact empirical depth of the pair anchor inside cones whose tip slides
//! along the pair axis.
//!
//! A cone with tip at offset `s < 0` opens toward `+u`; a point enters it once
//! `s ≤ c_k = z1[k] − z2[k]/tan(α/2)`. For `s ≥ 0` the cone opens toward `−u`
//! and the point enters once `s ≥ e_k = z1[k] + z2[k]/tan(α/2)`. The cones are
//! nested on each branch, so sorting the entry thresholds gives the whole
//! piecewise-constant depth function `s ↦ min(L(s), R(s)) / n`, where `L` and
//! `R` count inside points on either side of the hyperplane through the anchor.

use serde::{Deserialize, Serialize};

use crate::error::{DqfError, Result};
use crate::pair_geometry::PairFrame;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeConfig {
    /// Full opening angle in degrees.
    pub aperture_deg: f64,
    pub tan_half: f64,
    /// Count the two pair points themselves (denominator `n` instead of `n − 2`).
    pub include_pair_points: bool,
}

impl ConeConfig {
    pub fn new(aperture_deg: f64) -> Result<Self> {
        if !(aperture_deg > 0.0 && aperture_deg < 180.0) {
            return Err(DqfError::usage(format!(
                "aperture must lie strictly between 0 and 180 degrees, got {aperture_deg}"
            )));
        }
        Ok(ConeConfig {
            aperture_deg,
            tan_half: (aperture_deg.to_radians() / 2.0).tan(),
            include_pair_points: true,
        })
    }

    pub fn include_pair_points(mut self, include: bool) -> Self {
        self.include_pair_points = include;
        self
    }
}

impl Default for ConeConfig {
    fn default() -> Self {
        ConeConfig::new(90.0).expect("90 degrees is a valid aperture")
    }
}

/// Which side of the anchor hyperplane a point projects to. Points projecting
/// exactly onto the anchor belong to both closed half-spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
    Both,
}

impl Side {
    fn of(z1: f64) -> Side {
        if z1 < 0.0 {
            Side::Left
        } else if z1 > 0.0 {
            Side::Right
        } else {
            Side::Both
        }
    }

    fn counts(self) -> (u32, u32) {
        match self {
            Side::Left => (1, 0),
            Side::Right => (0, 1),
            Side::Both => (1, 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntryThreshold {
    pub k: usize,
    /// Entry offset on the negative branch.
    pub neg: f64,
    /// Entry offset on the non-negative branch.
    pub pos: f64,
    pub side: Side,
}

pub fn entry_thresholds(frame: &PairFrame, cone: &ConeConfig) -> Vec<EntryThreshold> {
    let inv_tan = 1.0 / cone.tan_half;
    frame
        .z1
        .iter()
        .zip(&frame.z2)
        .enumerate()
        .filter(|(k, _)| cone.include_pair_points || (*k != frame.i && *k != frame.j))
        .map(|(k, (&a, &b))| EntryThreshold {
            k,
            neg: a - b * inv_tan,
            pos: a + b * inv_tan,
            side: Side::of(a),
        })
        .collect()
}

/// One branch of the depth function: thresholds in the order points enter as
/// `|s|` grows, plus cumulative left/right counts (`left[m]` counts the first
/// `m` entries, so both vectors are one longer than `thresholds`).
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub thresholds: Vec<(f64, Side)>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
}

impl Branch {
    fn from_sorted(thresholds: Vec<(f64, Side)>) -> Branch {
        let mut left = Vec::with_capacity(thresholds.len() + 1);
        let mut right = Vec::with_capacity(thresholds.len() + 1);
        let (mut l, mut r) = (0u32, 0u32);
        left.push(0);
        right.push(0);
        for &(_, side) in &thresholds {
            let (dl, dr) = side.counts();
            l += dl;
            r += dr;
            left.push(l);
            right.push(r);
        }
        Branch {
            thresholds,
            left,
            right,
        }
    }

    /// Depth count once the first `m` entries are inside.
    #[inline]
    pub fn depth_after(&self, m: usize) -> u32 {
        self.left[m].min(self.right[m])
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// `out[t]` is the threshold of the entry that first pushes the depth count
    /// above `t`, for `t = 0..=max_count`; `None` when it never does.
    pub(crate) fn exceed_offsets(&self, max_count: u32) -> Vec<Option<f64>> {
        let mut out = vec![None; max_count as usize + 1];
        let mut t = 0u32;
        for m in 1..=self.len() {
            let depth = self.depth_after(m);
            while t < depth && t <= max_count {
                out[t as usize] = Some(self.thresholds[m - 1].0);
                t += 1;
            }
        }
        out
    }
}

/// Piecewise-constant depth function of one pair.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthProfile {
    pub pair: (usize, usize),
    /// Negative branch, thresholds `c_k` in descending order.
    pub neg: Branch,
    /// Non-negative branch, thresholds `e_k` in ascending order.
    pub pos: Branch,
    pub n_total: usize,
    pub max_reach: f64,
}

pub fn build_depth_profile(frame: &PairFrame, cone: &ConeConfig) -> Result<DepthProfile> {
    let entries = entry_thresholds(frame, cone);
    if entries.is_empty() {
        return Err(DqfError::data(format!(
            "pair ({}, {}) has no points to count",
            frame.i, frame.j
        )));
    }
    let max_reach = entries
        .iter()
        .map(|e| e.neg.abs().max(e.pos.abs()))
        .fold(0.0, f64::max);

    let mut neg: Vec<(f64, Side)> = entries.iter().map(|e| (e.neg, e.side)).collect();
    let mut pos: Vec<(f64, Side)> = entries.iter().map(|e| (e.pos, e.side)).collect();
    neg.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
    pos.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    Ok(DepthProfile {
        pair: (frame.i, frame.j),
        neg: Branch::from_sorted(neg),
        pos: Branch::from_sorted(pos),
        n_total: entries.len(),
        max_reach,
    })
}

impl DepthProfile {
    /// `min(L(s), R(s))` as an integer count.
    pub fn depth_count(&self, s: f64) -> u32 {
        if s < 0.0 {
            let m = self.neg.thresholds.partition_point(|&(c, _)| c >= s);
            self.neg.depth_after(m)
        } else {
            let m = self.pos.thresholds.partition_point(|&(e, _)| e <= s);
            self.pos.depth_after(m)
        }
    }

    /// Largest count the depth function attains (every point inside).
    pub fn max_count(&self) -> u32 {
        self.pos.depth_after(self.pos.len())
    }

    /// Count-valued sublevel set `{s : depth_count(s) ≤ t}` as `(lo, hi)`;
    /// `None` when empty. Endpoints may be infinite.
    pub fn sublevel_counts(&self, t: u32) -> Option<(f64, f64)> {
        let neg = self.neg.exceed_offsets(t)[t as usize];
        let pos = self.pos.exceed_offsets(t)[t as usize];
        interval_from_offsets(neg, pos)
    }
}

/// Combines the exceedance offsets of the two branches into the sublevel
/// interval. The negative part is `(c, 0)` and the non-negative part `[0, e)`.
pub(crate) fn interval_from_offsets(neg: Option<f64>, pos: Option<f64>) -> Option<(f64, f64)> {
    let lo = neg.unwrap_or(f64::NEG_INFINITY);
    let hi = pos.unwrap_or(f64::INFINITY);
    let neg_part = lo < 0.0;
    let pos_part = hi > 0.0;
    match (neg_part, pos_part) {
        (true, true) => Some((lo, hi)),
        (true, false) => Some((lo, 0.0)),
        (false, true) => Some((0.0, hi)),
        (false, false) => None,
    }
}

pub fn eval_depth(profile: &DepthProfile, s: f64) -> f64 {
    profile.depth_count(s) as f64 / profile.n_total as f64
}
