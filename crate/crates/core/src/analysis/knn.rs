//! Euclidean k-nearest-neighbour baseline.

use crate::error::{DqfError, Result};

/// Majority label among the `k` nearest rows of `features` (excluding row
/// `skip`). Distance ties keep the lower row index; vote ties go to the
/// smallest label.
pub fn knn_predict(
    features: &[Vec<f64>],
    labels: &[i64],
    query: &[f64],
    k: usize,
    skip: Option<usize>,
) -> i64 {
    let mut dist: Vec<(f64, usize)> = features
        .iter()
        .enumerate()
        .filter(|(r, _)| Some(*r) != skip)
        .map(|(r, x)| {
            let d: f64 = x.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
            (d, r)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut votes: Vec<(i64, usize)> = Vec::new();
    for &(_, r) in dist.iter().take(k) {
        match votes.iter_mut().find(|(y, _)| *y == labels[r]) {
            Some(v) => v.1 += 1,
            None => votes.push((labels[r], 1)),
        }
    }
    votes.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    votes[0].0
}

/// Leave-one-out predictions and correct-classification rate.
pub fn knn_loo(features: &[Vec<f64>], labels: &[i64], k: usize) -> Result<(Vec<i64>, f64)> {
    let n = features.len();
    if labels.len() != n {
        return Err(DqfError::usage("feature and label counts differ"));
    }
    if k == 0 || k >= n {
        return Err(DqfError::usage(format!(
            "k must lie in 1..{n} for {n} observations, got {k}"
        )));
    }
    let preds: Vec<i64> = (0..n)
        .map(|i| knn_predict(features, labels, &features[i], k, Some(i)))
        .collect();
    let hits = preds.iter().zip(labels).filter(|(p, y)| p == y).count();
    Ok((preds, hits as f64 / n as f64))
}
