//! Z1-Z2 coordinates of every observation relative to the line through a pair.
//!
//! For the pair `(i, j)` the anchor is the midpoint `m = (O_i + O_j)/2` and the
//! axis is `u = (O_i − O_j)/‖O_i − O_j‖`. `z1[k]` is the signed position of the
//! projection of `O_k` on the axis, `z2[k]` its distance to the axis. Both are
//! computed from inner products only.

use crate::error::{DqfError, Result};
use crate::inner_product::InnerProductView;

/// Relative threshold below which two observations count as duplicates.
pub const DEGENERATE_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct PairFrame {
    pub i: usize,
    pub j: usize,
    /// Half the distance between `O_i` and `O_j`.
    pub half_dist: f64,
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    /// Number of negative `z2²` radicands clamped to zero (indefinite Gram input).
    pub clamped: usize,
}

impl PairFrame {
    pub fn n(&self) -> usize {
        self.z1.len()
    }
}

/// Duplicate observations yield [`DqfError::Data`]; all-pairs callers skip such pairs.
pub fn compute_pair_frame(view: &InnerProductView, i: usize, j: usize) -> Result<PairFrame> {
    if i == j {
        return Err(DqfError::usage(format!(
            "pair ({i}, {j}) needs two distinct indices"
        )));
    }
    view.dot(i, j)?;

    let n = view.n();
    let dii = view.sq_norm(i);
    let djj = view.sq_norm(j);
    let dij = view.dot_unchecked(i, j);
    let d2 = dii + djj - 2.0 * dij;
    if d2 <= DEGENERATE_TOL * (dii + djj) || d2 <= 0.0 {
        return Err(DqfError::data(format!(
            "pair ({i}, {j}) is degenerate: observations coincide"
        )));
    }
    let dist = d2.sqrt();
    let inv = 1.0 / dist;
    let shift = 0.5 * (dii - djj);
    // ‖m‖² = (‖O_i‖² + 2⟨O_i,O_j⟩ + ‖O_j‖²)/4
    // grouped so that swapping i and j reproduces the frame bit for bit
    let anchor_sq = 0.25 * ((dii + djj) + 2.0 * dij);

    let mut z1 = Vec::with_capacity(n);
    let mut z2 = Vec::with_capacity(n);
    let mut clamped = 0;
    for k in 0..n {
        let dki = view.dot_unchecked(k, i);
        let dkj = view.dot_unchecked(k, j);
        let a = (dki - dkj - shift) * inv;
        let rad = view.sq_norm(k) - (dki + dkj) + anchor_sq - a * a;
        if rad < 0.0 && k != i && k != j {
            clamped += 1;
        }
        z1.push(a);
        z2.push(rad.max(0.0).sqrt());
    }
    let half_dist = 0.5 * dist;
    z1[i] = half_dist;
    z1[j] = -half_dist;
    z2[i] = 0.0;
    z2[j] = 0.0;

    Ok(PairFrame {
        i,
        j,
        half_dist,
        z1,
        z2,
        clamped,
    })
}

/// Largest `|z1[k]| + z2[k]/tan_half` over the frame. This bounds the tip
/// offset beyond which every point lies inside the cone on either branch.
pub(crate) fn frame_reach(frame: &PairFrame, tan_half: f64, skip_pair: bool) -> f64 {
    frame
        .z1
        .iter()
        .zip(&frame.z2)
        .enumerate()
        .filter(|(k, _)| !skip_pair || (*k != frame.i && *k != frame.j))
        .map(|(_, (a, b))| a.abs() + b / tan_half)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner_product::{GramMatrix, PointCloud};
    use crate::testutil::h4;

    #[test]
    fn hand_example() {
        let f = compute_pair_frame(&h4(), 0, 1).unwrap();
        let z1 = [1.0, -1.0, 0.2, -0.4];
        let z2 = [0.0, 0.0, 0.3, 0.2];
        for k in 0..4 {
            assert!((f.z1[k] - z1[k]).abs() < 1e-12, "z1[{k}] = {}", f.z1[k]);
            assert!((f.z2[k] - z2[k]).abs() < 1e-9, "z2[{k}] = {}", f.z2[k]);
        }
        assert_eq!(f.half_dist, 1.0);
        assert_eq!(f.clamped, 0);
    }

    #[test]
    fn endpoints_sit_on_the_axis() {
        let f = compute_pair_frame(&h4(), 2, 3).unwrap();
        assert_eq!(f.z1[2], f.half_dist);
        assert_eq!(f.z1[3], -f.half_dist);
        assert_eq!(f.z2[2], 0.0);
        assert_eq!(f.z2[3], 0.0);
    }

    #[test]
    fn orthonormal_gram_limit() {
        let n = 5;
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            k[i * n + i] = 1.0;
        }
        let v = InnerProductView::from_gram(GramMatrix::new(n, k).unwrap()).unwrap();
        let f = compute_pair_frame(&v, 1, 3).unwrap();
        for k in [0, 2, 4] {
            assert!(f.z1[k].abs() < 1e-15);
            assert!((f.z2[k] - 1.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn duplicates_are_degenerate() {
        let rows = vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![0.0, 2.0]];
        let v = InnerProductView::from_cloud(PointCloud::from_rows(&rows).unwrap());
        assert!(matches!(
            compute_pair_frame(&v, 0, 1),
            Err(DqfError::Data(_))
        ));
        assert!(matches!(
            compute_pair_frame(&v, 0, 0),
            Err(DqfError::Usage(_))
        ));
        assert!(matches!(
            compute_pair_frame(&v, 0, 9),
            Err(DqfError::Usage(_))
        ));
    }

    #[test]
    fn swap_mirrors_z1() {
        let v = h4();
        let a = compute_pair_frame(&v, 2, 0).unwrap();
        let b = compute_pair_frame(&v, 0, 2).unwrap();
        for k in 0..4 {
            assert!((a.z1[k] + b.z1[k]).abs() < 1e-12);
            assert!((a.z2[k] - b.z2[k]).abs() < 1e-12);
        }
    }
}
