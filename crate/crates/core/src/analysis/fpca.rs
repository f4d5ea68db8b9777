//! Functional PCA of curves sampled on a shared grid.

use serde::{Deserialize, Serialize};

use super::eigen::jacobi_eigen;
use crate::error::{DqfError, Result};

/// Default number of retained components.
pub const DEFAULT_COMPONENTS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FpcaModel {
    pub grid_size: usize,
    pub mean: Vec<f64>,
    /// Full spectrum of the sample covariance, descending, clamped at 0.
    pub eigenvalues: Vec<f64>,
    /// Leading eigencurves with non-negligible eigenvalue, at most `components`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Number of scores returned by [`FpcaModel::score`].
    pub components: usize,
}

impl FpcaModel {
    /// Projections of the centered curve; trailing scores beyond the
    /// available eigencurves are 0.
    pub fn score(&self, curve: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.components];
        for (o, v) in out.iter_mut().zip(&self.eigenvectors) {
            *o = curve
                .iter()
                .zip(&self.mean)
                .zip(v)
                .map(|((x, m), e)| (x - m) * e)
                .sum();
        }
        out
    }

    pub fn reconstruct(&self, scores: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (s, v) in scores.iter().zip(&self.eigenvectors) {
            for (o, e) in out.iter_mut().zip(v) {
                *o += s * e;
            }
        }
        out
    }

    pub fn total_variance(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// True when fewer non-degenerate eigencurves exist than requested.
    pub fn is_rank_deficient(&self) -> bool {
        self.eigenvectors.len() < self.components
    }
}

pub fn fit_fpca(curves: &[Vec<f64>], components: usize) -> Result<FpcaModel> {
    if curves.len() < 2 {
        return Err(DqfError::usage(format!(
            "fPCA needs at least 2 curves, got {}",
            curves.len()
        )));
    }
    let m = curves[0].len();
    if curves.iter().any(|c| c.len() != m) {
        return Err(DqfError::usage("curves must share one grid"));
    }
    if components == 0 || components > m {
        return Err(DqfError::usage(format!(
            "cannot retain {components} components from a grid of {m}"
        )));
    }
    let count = curves.len() as f64;
    let mut mean = vec![0.0; m];
    for c in curves {
        for (a, v) in mean.iter_mut().zip(c) {
            *a += v;
        }
    }
    mean.iter_mut().for_each(|a| *a /= count);

    let mut cov = vec![0.0; m * m];
    let mut centered = vec![0.0; m];
    for c in curves {
        for ((z, v), mu) in centered.iter_mut().zip(c).zip(&mean) {
            *z = v - mu;
        }
        for a in 0..m {
            let za = centered[a];
            if za == 0.0 {
                continue;
            }
            let row = &mut cov[a * m..(a + 1) * m];
            for (r, zb) in row.iter_mut().zip(&centered).skip(a) {
                *r += za * zb;
            }
        }
    }
    let scale = 1.0 / (count - 1.0);
    for a in 0..m {
        for b in a..m {
            let v = cov[a * m + b] * scale;
            cov[a * m + b] = v;
            cov[b * m + a] = v;
        }
    }

    let eig = jacobi_eigen(&cov, m)?;
    let eigenvalues: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
    let trace: f64 = (0..m).map(|a| cov[a * m + a]).sum();
    let floor = 1e-12 * trace.max(f64::MIN_POSITIVE);
    let eigenvectors = eig
        .vectors
        .into_iter()
        .zip(&eigenvalues)
        .take(components)
        .filter(|(_, &lambda)| lambda > floor)
        .map(|(v, _)| v)
        .collect();

    Ok(FpcaModel {
        grid_size: m,
        mean,
        eigenvalues,
        eigenvectors,
        components,
    })
}
