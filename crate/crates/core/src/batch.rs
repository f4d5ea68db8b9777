//! All-pairs computation and observation-level summaries.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::{build_depth_profile, ConeConfig};
use crate::error::{DqfError, Result};
use crate::inner_product::InnerProductView;
use crate::pair_geometry::{compute_pair_frame, frame_reach};
use crate::quantile::{
    build_dqf, delta_grid, derive_support, DepthQuantileFunction, TipDistribution, DEFAULT_GRID,
    DEFAULT_MARGIN,
};

/// How the tip distribution is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Support {
    /// `margin × max reach` over all computed pairs.
    Auto {
        margin: f64,
    },
    Fixed(TipDistribution),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub cone: ConeConfig,
    pub support: Support,
    pub grid_size: usize,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            cone: ConeConfig::default(),
            support: Support::Auto {
                margin: DEFAULT_MARGIN,
            },
            grid_size: DEFAULT_GRID,
        }
    }
}

/// Resolved parameters of a batch run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub cone: ConeConfig,
    pub tip: TipDistribution,
    pub grid_size: usize,
}

/// Index of the unordered pair `i < j` in lexicographic order.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect()
}

/// Pairs are split into fixed blocks; each block writes only its own slots.
const BLOCK: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct DqfCollection {
    n: usize,
    grid: Vec<f64>,
    slots: Vec<Option<DepthQuantileFunction>>,
    pub skipped: Vec<(usize, usize)>,
    pub config: ConfigSnapshot,
    /// Negative `z2²` radicands clamped across all pairs.
    pub clamped: usize,
}

impl DqfCollection {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// DQF of the unordered pair; `None` if it was skipped. Order of `i`, `j`
    /// does not matter since the tip distribution is symmetric.
    pub fn get(&self, i: usize, j: usize) -> Option<&DepthQuantileFunction> {
        if i == j || i >= self.n || j >= self.n {
            return None;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.slots[pair_index(self.n, a, b)].as_ref()
    }

    pub fn len(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &DepthQuantileFunction> {
        self.slots.iter().flatten()
    }
}

/// Largest entry threshold over the given pairs; degenerate pairs are ignored.
pub fn max_reach(view: &InnerProductView, cone: &ConeConfig, pairs: &[(usize, usize)]) -> f64 {
    pairs
        .par_iter()
        .with_min_len(BLOCK)
        .filter_map(|&(i, j)| {
            compute_pair_frame(view, i, j)
                .ok()
                .map(|f| frame_reach(&f, cone.tan_half, !cone.include_pair_points))
        })
        .reduce(|| 0.0, f64::max)
}

fn resolve_support(
    view: &InnerProductView,
    config: &BatchConfig,
    pairs: &[(usize, usize)],
) -> Result<TipDistribution> {
    match config.support {
        Support::Fixed(g) => Ok(g),
        Support::Auto { margin } => {
            if margin.is_nan() || margin < 1.0 {
                return Err(DqfError::usage(format!(
                    "support margin must be ≥ 1, got {margin}"
                )));
            }
            derive_support([max_reach(view, &config.cone, pairs)], margin)
        }
    }
}

type PairResult = Option<(DepthQuantileFunction, usize)>;

fn compute_pairs(
    view: &InnerProductView,
    pairs: &[(usize, usize)],
    cone: &ConeConfig,
    tip: &TipDistribution,
    grid_size: usize,
) -> Result<Vec<PairResult>> {
    pairs
        .par_iter()
        .with_min_len(BLOCK)
        .map(|&(i, j)| {
            let frame = match compute_pair_frame(view, i, j) {
                Ok(f) => f,
                Err(DqfError::Data(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let profile = build_depth_profile(&frame, cone)?;
            Ok(Some((build_dqf(&profile, tip, grid_size), frame.clamped)))
        })
        .collect()
}

/// DQFs for an explicit list of pairs (either endpoint order), in list order.
/// Degenerate pairs come back as `None`. With [`Support::Auto`] the support
/// is derived from these pairs only.
pub fn pairs_dqf(
    view: &InnerProductView,
    pairs: &[(usize, usize)],
    config: &BatchConfig,
) -> Result<(Vec<Option<DepthQuantileFunction>>, ConfigSnapshot)> {
    if config.grid_size == 0 {
        return Err(DqfError::usage("grid size must be positive"));
    }
    let tip = resolve_support(view, config, pairs)?;
    let dqfs = compute_pairs(view, pairs, &config.cone, &tip, config.grid_size)?
        .into_iter()
        .map(|r| r.map(|(q, _)| q))
        .collect();
    Ok((
        dqfs,
        ConfigSnapshot {
            cone: config.cone,
            tip,
            grid_size: config.grid_size,
        },
    ))
}

/// DQFs of every unordered pair. Output does not depend on the number of
/// worker threads.
pub fn all_pairs_dqf(view: &InnerProductView, config: &BatchConfig) -> Result<DqfCollection> {
    let n = view.n();
    if n < 3 {
        return Err(DqfError::usage(format!(
            "need at least 3 observations, got {n}"
        )));
    }
    if config.grid_size == 0 {
        return Err(DqfError::usage("grid size must be positive"));
    }
    let pairs = all_pairs(n);
    let tip = resolve_support(view, config, &pairs)?;
    let results = compute_pairs(view, &pairs, &config.cone, &tip, config.grid_size)?;

    let mut slots = Vec::with_capacity(pairs.len());
    let mut skipped = Vec::new();
    let mut clamped = 0;
    for (r, &pair) in results.into_iter().zip(&pairs) {
        match r {
            Some((q, c)) => {
                clamped += c;
                slots.push(Some(q));
            }
            None => {
                skipped.push(pair);
                slots.push(None);
            }
        }
    }
    if skipped.len() == pairs.len() {
        return Err(DqfError::data("every pair is degenerate"));
    }
    Ok(DqfCollection {
        n,
        grid: delta_grid(config.grid_size),
        slots,
        skipped,
        config: ConfigSnapshot {
            cone: config.cone,
            tip,
            grid_size: config.grid_size,
        },
        clamped,
    })
}

/// Denominator used for the per-observation average.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum AverageScaling {
    /// Mean over the pairs actually included.
    #[default]
    PairCount,
    /// Sum divided by the sample size `n`.
    SampleSize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairCategory {
    Within,
    Between,
}

/// Observation-level functions on the shared grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SummarySet {
    pub grid: Vec<f64>,
    /// `average[i]` is the mean of `q_ij` over `j ≠ i`.
    pub average: Vec<Vec<f64>>,
    /// Sorted distinct labels; empty without labels.
    pub classes: Vec<i64>,
    /// `class_average[c][i]`: mean of `q_ij` over `j ≠ i` with label `classes[c]`.
    pub class_average: Vec<Vec<Vec<f64>>>,
    pub labels: Option<Vec<i64>>,
}

impl SummarySet {
    pub fn n(&self) -> usize {
        self.average.len()
    }

    pub fn pair_category(&self, i: usize, j: usize) -> Option<PairCategory> {
        let y = self.labels.as_ref()?;
        Some(if y[i] == y[j] {
            PairCategory::Within
        } else {
            PairCategory::Between
        })
    }

    /// Averages divided by their value at `δ = 1`.
    pub fn normalized_average(&self) -> Vec<Vec<f64>> {
        self.average.iter().map(|c| normalize_curve(c)).collect()
    }
}

pub fn normalize_curve(curve: &[f64]) -> Vec<f64> {
    let top = curve.last().copied().unwrap_or(0.0);
    if top > 0.0 {
        curve.iter().map(|v| v / top).collect()
    } else {
        vec![0.0; curve.len()]
    }
}

/// Sorted distinct labels; errors if any class has fewer than two members.
pub fn class_list(labels: &[i64]) -> Result<Vec<i64>> {
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    for &c in &classes {
        let count = labels.iter().filter(|&&y| y == c).count();
        if count < 2 {
            return Err(DqfError::usage(format!(
                "class {c} has {count} member(s); class averages need at least 2"
            )));
        }
    }
    Ok(classes)
}

/// Per-observation sums of `q_ij` over partners `j`, grouped by a partner
/// key. Sums are kept as integer depth counts, so they do not depend on the
/// order in which pairs are visited.
#[derive(Clone, Debug)]
pub(crate) struct PartnerSums {
    /// `sums[i][g]` holds one count per grid point.
    pub sums: Vec<Vec<Vec<u64>>>,
    pub counts: Vec<Vec<usize>>,
    pub n_total: usize,
}

impl PartnerSums {
    pub fn new(coll: &DqfCollection, group_of: &[usize], groups: usize) -> Self {
        let n = coll.n();
        let m = coll.grid().len();
        let mut sums = vec![vec![vec![0u64; m]; groups]; n];
        let mut counts = vec![vec![0usize; groups]; n];
        let mut n_total = 0;
        for i in 0..n {
            for (j, &g) in group_of.iter().enumerate().take(n) {
                if let Some(q) = coll.get(i, j) {
                    n_total = q.n_total;
                    counts[i][g] += 1;
                    for (s, c) in sums[i][g].iter_mut().zip(q.grid_counts()) {
                        *s += c;
                    }
                }
            }
        }
        PartnerSums {
            sums,
            counts,
            n_total,
        }
    }

    pub fn mean(&self, i: usize, g: usize) -> Vec<f64> {
        mean_counts(&self.sums[i][g], self.counts[i][g], self.n_total)
    }
}

pub(crate) fn mean_counts(sum: &[u64], count: usize, n_total: usize) -> Vec<f64> {
    if count == 0 {
        return vec![0.0; sum.len()];
    }
    let denom = (count * n_total) as f64;
    sum.iter().map(|&s| s as f64 / denom).collect()
}

pub fn summarize(
    coll: &DqfCollection,
    labels: Option<&[i64]>,
    scaling: AverageScaling,
) -> Result<SummarySet> {
    let n = coll.n();
    if let Some(y) = labels {
        if y.len() != n {
            return Err(DqfError::usage(format!(
                "{} labels supplied for {n} observations",
                y.len()
            )));
        }
    }

    let all = PartnerSums::new(coll, &vec![0; n], 1);
    let average = (0..n)
        .map(|i| match scaling {
            AverageScaling::PairCount => all.mean(i, 0),
            AverageScaling::SampleSize => {
                let denom = (n * all.n_total.max(1)) as f64;
                all.sums[i][0].iter().map(|&s| s as f64 / denom).collect()
            }
        })
        .collect();

    let (classes, class_average) = match labels {
        None => (Vec::new(), Vec::new()),
        Some(y) => {
            let classes = class_list(y)?;
            let group_of: Vec<usize> = y
                .iter()
                .map(|l| {
                    classes
                        .binary_search(l)
                        .expect("label present in class list")
                })
                .collect();
            let sums = PartnerSums::new(coll, &group_of, classes.len());
            let per_class = (0..classes.len())
                .map(|c| (0..n).map(|i| sums.mean(i, c)).collect())
                .collect();
            (classes, per_class)
        }
    };

    Ok(SummarySet {
        grid: coll.grid().to_vec(),
        average,
        classes,
        class_average,
        labels: labels.map(<[i64]>::to_vec),
    })
}
