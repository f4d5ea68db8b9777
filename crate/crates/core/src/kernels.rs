//! Gram matrices from coordinate data and bandwidth sweeps of Z1-Z2 frames.
//!
//! The RBF bandwidth divides the *squared* distance by `σ²`:
//! `K(x, y) = exp(−‖x − y‖² / σ²)`. Many libraries use `2σ²` instead.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DqfError, Result};
use crate::inner_product::{dot_slices, GramMatrix, InnerProductView, PointCloud};
use crate::pair_geometry::{compute_pair_frame, PairFrame};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    Rbf { sigma: f64 },
}

impl KernelSpec {
    pub fn rbf(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(DqfError::usage(format!(
                "RBF bandwidth must be positive, got {sigma}"
            )));
        }
        Ok(KernelSpec::Rbf { sigma })
    }
}

pub fn gram_from_kernel(cloud: &PointCloud, spec: KernelSpec) -> Result<GramMatrix> {
    let n = cloud.n();
    let rows: Vec<Vec<f64>> = match spec {
        KernelSpec::Linear => (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| dot_slices(cloud.row(i), cloud.row(j)))
                    .collect()
            })
            .collect(),
        KernelSpec::Rbf { sigma } => {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(DqfError::usage(format!(
                    "RBF bandwidth must be positive, got {sigma}"
                )));
            }
            let inv = 1.0 / (sigma * sigma);
            (0..n)
                .into_par_iter()
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                return 1.0;
                            }
                            let d2: f64 = cloud
                                .row(i)
                                .iter()
                                .zip(cloud.row(j))
                                .map(|(a, b)| (a - b) * (a - b))
                                .sum();
                            (-d2 * inv).exp()
                        })
                        .collect()
                })
                .collect()
        }
    };
    GramMatrix::from_rows(&rows)
}

/// Frames of one pair under a range of RBF bandwidths.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaSweep {
    pub pair: (usize, usize),
    /// Bandwidths that produced a frame, aligned with `frames`.
    pub sigmas: Vec<f64>,
    pub frames: Vec<PairFrame>,
    /// Bandwidths at which the pair became numerically degenerate.
    pub skipped: Vec<f64>,
}

impl SigmaSweep {
    /// `(σ, z1, z2)` path of observation `k`.
    pub fn trajectory(&self, k: usize) -> Vec<(f64, f64, f64)> {
        self.sigmas
            .iter()
            .zip(&self.frames)
            .map(|(&s, f)| (s, f.z1[k], f.z2[k]))
            .collect()
    }
}

pub fn sigma_sweep(cloud: &PointCloud, i: usize, j: usize, sigmas: &[f64]) -> Result<SigmaSweep> {
    if let Some(&bad) = sigmas.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(DqfError::usage(format!(
            "bandwidths must be positive, got {bad}"
        )));
    }
    if sigmas.windows(2).any(|w| w[0] > w[1]) {
        return Err(DqfError::usage("bandwidths must be sorted ascending"));
    }
    if i == j || i >= cloud.n() || j >= cloud.n() {
        return Err(DqfError::usage(format!("invalid pair ({i}, {j})")));
    }
    let results: Vec<Result<Option<PairFrame>>> = sigmas
        .par_iter()
        .map(|&sigma| {
            let gram = gram_from_kernel(cloud, KernelSpec::Rbf { sigma })?;
            let view = InnerProductView::from_gram(gram)?;
            match compute_pair_frame(&view, i, j) {
                Ok(f) => Ok(Some(f)),
                Err(DqfError::Data(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut sweep = SigmaSweep {
        pair: (i, j),
        sigmas: Vec::new(),
        frames: Vec::new(),
        skipped: Vec::new(),
    };
    for (r, &sigma) in results.into_iter().zip(sigmas) {
        match r? {
            Some(f) => {
                sweep.sigmas.push(sigma);
                sweep.frames.push(f);
            }
            None => sweep.skipped.push(sigma),
        }
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_cloud;

    fn line_cloud(n: usize) -> PointCloud {
        // unit-spaced points on a line
        let rows: Vec<Vec<f64>> = (0..n).map(|k| vec![k as f64, 0.0]).collect();
        PointCloud::from_rows(&rows).unwrap()
    }

    #[test]
    fn rbf_diagonal_and_value() {
        let g = gram_from_kernel(&line_cloud(3), KernelSpec::rbf(1.0).unwrap()).unwrap();
        for i in 0..3 {
            assert_eq!(g.get(i, i), 1.0);
        }
        assert!((g.get(0, 1) - 0.36787944117144233).abs() < 1e-15);
        assert_eq!(g.get(0, 1), g.get(1, 0));
    }

    #[test]
    fn rejects_bad_bandwidth() {
        assert!(KernelSpec::rbf(0.0).is_err());
        assert!(KernelSpec::rbf(-1.0).is_err());
        let c = line_cloud(3);
        assert!(gram_from_kernel(&c, KernelSpec::Rbf { sigma: 0.0 }).is_err());
        assert!(sigma_sweep(&c, 0, 1, &[1.0, -2.0]).is_err());
        assert!(sigma_sweep(&c, 0, 1, &[2.0, 1.0]).is_err());
        assert!(sigma_sweep(&c, 0, 0, &[1.0]).is_err());
    }

    #[test]
    fn linear_gram_is_dot_products() {
        let c = random_cloud(7, 3, 2);
        let g = gram_from_kernel(&c, KernelSpec::Linear).unwrap();
        assert_eq!(g, c.linear_gram());
        assert_eq!(g.get(2, 5), dot_slices(c.row(2), c.row(5)));
    }

    #[test]
    fn small_bandwidth_orthogonal_limit() {
        let sweep = sigma_sweep(&line_cloud(6), 1, 4, &[1e-3]).unwrap();
        let f = &sweep.frames[0];
        for k in [0, 2, 3, 5] {
            assert!(f.z1[k].abs() < 1e-6);
            assert!((f.z2[k] - 1.224744871391589).abs() < 1e-6);
        }
    }

    #[test]
    fn large_bandwidth_collapses_to_origin() {
        let sweep = sigma_sweep(&line_cloud(6), 1, 4, &[1e6]).unwrap();
        assert!(sweep.skipped.is_empty());
        let f = &sweep.frames[0];
        for k in 0..6 {
            assert!(f.z2[k] < 1e-4, "z2[{k}] = {}", f.z2[k]);
            assert!(f.z1[k].abs() < 1e-4);
        }
    }

    #[test]
    fn sweep_matches_direct_frame() {
        let c = random_cloud(10, 3, 8);
        let sweep = sigma_sweep(&c, 2, 7, &[0.5, 1.0, 2.0]).unwrap();
        for (s, f) in sweep.sigmas.iter().zip(&sweep.frames) {
            let g = gram_from_kernel(&c, KernelSpec::rbf(*s).unwrap()).unwrap();
            let direct =
                compute_pair_frame(&InnerProductView::from_gram(g).unwrap(), 2, 7).unwrap();
            assert_eq!(&direct, f);
        }
        assert_eq!(sweep.trajectory(3).len(), 3);
    }

    #[test]
    fn sweep_trajectories_are_continuous() {
        let c = random_cloud(12, 2, 4);
        let sigmas: Vec<f64> = (0..200).map(|k| 0.5 * 1.005f64.powi(k)).collect();
        let sweep = sigma_sweep(&c, 0, 1, &sigmas).unwrap();
        for k in 2..12 {
            let path = sweep.trajectory(k);
            for w in path.windows(2) {
                let jump = (w[1].1 - w[0].1).hypot(w[1].2 - w[0].2);
                assert!(jump < 0.05, "observation {k} jumps by {jump}");
            }
        }
    }
}
