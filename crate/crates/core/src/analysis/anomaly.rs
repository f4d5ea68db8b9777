//! Single-level anomaly scores and ROC AUC.

use serde::{Deserialize, Serialize};

use crate::batch::SummarySet;
use crate::error::{DqfError, Result};

pub const DEFAULT_DELTA_STAR: f64 = 0.17;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnomalyReport {
    pub scores: Vec<f64>,
    pub delta_star: f64,
    /// Grid level actually read (smallest grid point ≥ `delta_star`).
    pub delta_used: f64,
    pub normalized: bool,
    pub auc: Option<f64>,
}

/// Index of the smallest grid point `m/M ≥ delta`.
pub fn snap_to_grid(delta: f64, grid_size: usize) -> usize {
    let m = (delta * grid_size as f64 - 1e-9).ceil().max(1.0) as usize;
    m.min(grid_size) - 1
}

/// `q_i(δ*)`, or `q_i(δ*)/q_i(1)` when normalized (0 when `q_i(1) = 0`).
pub fn anomaly_scores(
    summaries: &SummarySet,
    delta_star: f64,
    normalized: bool,
) -> Result<AnomalyReport> {
    if !(delta_star > 0.0 && delta_star <= 1.0) {
        return Err(DqfError::usage(format!(
            "δ* must lie in (0, 1], got {delta_star}"
        )));
    }
    let grid_size = summaries.grid.len();
    let idx = snap_to_grid(delta_star, grid_size);
    let scores = summaries
        .average
        .iter()
        .map(|c| curve_score(c, idx, normalized))
        .collect();
    Ok(AnomalyReport {
        scores,
        delta_star,
        delta_used: summaries.grid[idx],
        normalized,
        auc: None,
    })
}

pub(crate) fn curve_score(curve: &[f64], idx: usize, normalized: bool) -> f64 {
    let v = curve[idx];
    if !normalized {
        return v;
    }
    let top = curve[curve.len() - 1];
    if top > 0.0 {
        v / top
    } else {
        0.0
    }
}

impl AnomalyReport {
    /// Outlyingness: the negated score. Outlying anchors sit in sparse
    /// regions, where depth stays low over more of the tip range.
    pub fn outlyingness(&self) -> Vec<f64> {
        self.scores.iter().map(|s| -s).collect()
    }

    /// ROC AUC of outlyingness against known outlier flags; stores and
    /// returns it.
    pub fn evaluate(&mut self, outlier: &[bool]) -> Result<f64> {
        let auc = roc_auc(&self.outlyingness(), outlier)?;
        self.auc = Some(auc);
        Ok(auc)
    }
}

/// `P(score_pos > score_neg) + ½ P(tie)` over all positive/negative pairs,
/// computed from mid-ranks.
pub fn roc_auc(scores: &[f64], positive: &[bool]) -> Result<f64> {
    if scores.len() != positive.len() {
        return Err(DqfError::usage("scores and labels differ in length"));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(DqfError::numeric("NaN score"));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(DqfError::usage("ROC AUC needs both classes present"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // twice the rank sum keeps mid-ranks integral
    let mut rank_sum2: u64 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end share the mid-rank (start + 1 + end) / 2
        let mid2 = (start + 1 + end) as u64;
        let pos_in_group = order[start..end].iter().filter(|&&k| positive[k]).count() as u64;
        rank_sum2 += mid2 * pos_in_group;
        start = end;
    }
    let (np, nn) = (n_pos as u64, n_neg as u64);
    let u2 = rank_sum2 - np * (np + 1);
    Ok(u2 as f64 / (2 * np * nn) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(curves: Vec<Vec<f64>>) -> SummarySet {
        let m = curves[0].len();
        SummarySet {
            grid: crate::quantile::delta_grid(m),
            average: curves,
            classes: Vec::new(),
            class_average: Vec::new(),
            labels: None,
        }
    }

    #[test]
    fn grid_snapping() {
        assert_eq!(snap_to_grid(0.17, 100), 16);
        assert_eq!(snap_to_grid(0.171, 100), 17);
        assert_eq!(snap_to_grid(1.0, 100), 99);
        assert_eq!(snap_to_grid(0.39, 100), 38);
        assert_eq!(snap_to_grid(1e-6, 100), 0);
    }

    #[test]
    fn scores() {
        let mut h4_like = vec![0.0; 50];
        h4_like.extend(vec![0.25; 41]);
        h4_like.extend(vec![0.5; 9]);
        let s = summary(vec![vec![0.3; 100], h4_like, vec![0.0; 100]]);
        let r = anomaly_scores(&s, 0.6, true).unwrap();
        assert_eq!(r.scores, vec![1.0, 0.5, 0.0]);
        let r = anomaly_scores(&s, 0.6, false).unwrap();
        assert_eq!(r.scores, vec![0.3, 0.25, 0.0]);
        assert!(anomaly_scores(&s, 0.0, true).is_err());

        let mut r = anomaly_scores(&s, 0.6, false).unwrap();
        assert_eq!(r.evaluate(&[false, false, true]).unwrap(), 1.0);
        assert_eq!(r.auc, Some(1.0));
        assert!(anomaly_scores(&s, 1.5, true).is_err());
    }

    #[test]
    fn auc_examples() {
        let auc = roc_auc(&[0.9, 0.8, 0.3, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(auc, 1.0);
        assert_eq!(
            roc_auc(&[0.4; 6], &[true, false, true, false, false, true]).unwrap(),
            0.5
        );
        let auc = roc_auc(&[0.5, 0.2, 0.4, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(auc, 0.75);
        assert!(roc_auc(&[0.1, 0.2], &[true, true]).is_err());
    }
}
