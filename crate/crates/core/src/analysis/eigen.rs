//! Cyclic Jacobi eigensolver for real symmetric matrices.

use crate::error::{DqfError, Result};

/// Off-diagonal Frobenius norm, relative to the full norm, at which sweeps stop.
pub const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricEigen {
    /// Descending.
    pub values: Vec<f64>,
    /// `vectors[r]` is the unit eigenvector of `values[r]`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

/// Eigen-decomposition of the `n × n` row-major symmetric matrix `a`.
pub fn jacobi_eigen(a: &[f64], n: usize) -> Result<SymmetricEigen> {
    if a.len() != n * n {
        return Err(DqfError::usage(format!(
            "matrix of order {n} needs {} entries, got {}",
            n * n,
            a.len()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(DqfError::numeric(
            "non-finite entry in symmetric eigenproblem",
        ));
    }
    let mut m = a.to_vec();
    // v is stored row-major; column r holds the r-th eigenvector
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let frob = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| 2.0 * m[p * n + q] * m[p * n + q])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * frob || frob == 0.0 {
            break;
        }
        sweeps += 1;
        let skip = 1e-3 * JACOBI_TOL * frob / n as f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= skip {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, n, p, q, c, s);
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if sweeps == MAX_SWEEPS {
        return Err(DqfError::numeric("Jacobi sweeps did not converge"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[y * n + y].total_cmp(&m[x * n + x]));
    let values = order.iter().map(|&r| m[r * n + r]).collect();
    let vectors = order
        .iter()
        .map(|&r| (0..n).map(|k| v[k * n + r]).collect())
        .collect();
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

/// `m ← Jᵀ m J` for the plane rotation in coordinates `(p, q)`.
fn rotate(m: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..n {
        let (akp, akq) = (m[k * n + p], m[k * n + q]);
        m[k * n + p] = c * akp - s * akq;
        m[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (m[p * n + k], m[q * n + k]);
        m[p * n + k] = c * apk - s * aqk;
        m[q * n + k] = s * apk + c * aqk;
    }
}
