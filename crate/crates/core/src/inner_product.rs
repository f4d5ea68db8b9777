//! Inner products between observations, backed either by coordinates or by a
//! precomputed Gram matrix. Everything downstream only ever asks for `dot`.

use serde::{Deserialize, Serialize};

use crate::error::{DqfError, Result};

/// Relative tolerance used when checking a Gram matrix for symmetry.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// `n` observations in `d` dimensions, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    n: usize,
    d: usize,
    coords: Vec<f64>,
    labels: Option<Vec<i64>>,
}

impl PointCloud {
    pub fn new(n: usize, d: usize, coords: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(DqfError::data("point cloud needs at least one dimension"));
        }
        if coords.len() != n * d {
            return Err(DqfError::data(format!(
                "expected {} coordinates for {n}x{d} cloud, got {}",
                n * d,
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            return Err(DqfError::data(format!(
                "non-finite coordinate at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        Ok(PointCloud {
            n,
            d,
            coords,
            labels: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().position(|r| r.len() != d) {
            return Err(DqfError::data(format!(
                "ragged row {r}: expected {d} values, got {}",
                rows[r].len()
            )));
        }
        PointCloud::new(rows.len(), d, rows.concat())
    }

    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(DqfError::usage(format!(
                "{} labels supplied for {} observations",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    /// Applies `f` to every row, producing a cloud of dimension `new_dim`.
    pub fn map_rows<F>(&self, new_dim: usize, mut f: F) -> Result<PointCloud>
    where
        F: FnMut(&[f64], &mut Vec<f64>),
    {
        let mut out = Vec::with_capacity(self.n * new_dim);
        for row in self.rows() {
            f(row, &mut out);
        }
        let mut cloud = PointCloud::new(self.n, new_dim, out)?;
        cloud.labels = self.labels.clone();
        Ok(cloud)
    }

    /// Linear-kernel Gram matrix `X Xᵀ`.
    pub fn linear_gram(&self) -> GramMatrix {
        let n = self.n;
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = dot_slices(self.row(i), self.row(j));
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        GramMatrix { n, k }
    }
}

/// Square matrix of pairwise inner products `K(O_i, O_j)`, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    n: usize,
    k: Vec<f64>,
}

impl GramMatrix {
    pub fn new(n: usize, k: Vec<f64>) -> Result<Self> {
        if k.len() != n * n {
            return Err(DqfError::data(format!(
                "Gram matrix of order {n} needs {} entries, got {}",
                n * n,
                k.len()
            )));
        }
        if let Some(pos) = k.iter().position(|v| !v.is_finite()) {
            return Err(DqfError::data(format!(
                "non-finite Gram entry at ({}, {})",
                pos / n,
                pos % n
            )));
        }
        Ok(GramMatrix { n, k })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().position(|r| r.len() != n) {
            return Err(DqfError::data(format!(
                "Gram matrix must be square: row {r} has {} entries, expected {n}",
                rows[r].len()
            )));
        }
        GramMatrix::new(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.k
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.k[i * n + j] + self.k[j * n + i]);
                self.k[i * n + j] = avg;
                self.k[j * n + i] = avg;
            }
        }
    }
}

/// Findings of [`validate_gram`]. Positive semidefiniteness is not checked.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GramReport {
    /// Off-diagonal pairs `(i, j)`, `i < j`, whose asymmetry exceeds [`SYMMETRY_TOL`].
    pub symmetry_violations: Vec<(usize, usize)>,
    /// Diagonal indices with a negative squared norm.
    pub negative_diagonal: Vec<usize>,
    /// Pairs whose implied squared distance is negative and gets clamped to 0.
    pub clamped_distances: usize,
}

impl GramReport {
    pub fn is_clean(&self) -> bool {
        self.symmetry_violations.is_empty()
            && self.negative_diagonal.is_empty()
            && self.clamped_distances == 0
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.symmetry_violations.is_empty() {
            out.push(format!(
                "{} asymmetric Gram entries beyond relative tolerance {SYMMETRY_TOL:e}; using (K+Kᵀ)/2",
                self.symmetry_violations.len()
            ));
        }
        if !self.negative_diagonal.is_empty() {
            out.push(format!(
                "{} negative diagonal entries (first at index {})",
                self.negative_diagonal.len(),
                self.negative_diagonal[0]
            ));
        }
        if self.clamped_distances > 0 {
            out.push(format!(
                "{} pairs have negative squared distance (indefinite Gram); clamped to 0",
                self.clamped_distances
            ));
        }
        out
    }
}

pub fn validate_gram(g: &GramMatrix) -> GramReport {
    let n = g.n;
    let scale = (0..n).map(|i| g.get(i, i).abs()).fold(0.0, f64::max);
    let mut report = GramReport::default();
    for i in 0..n {
        if g.get(i, i) < 0.0 {
            report.negative_diagonal.push(i);
        }
        for j in (i + 1)..n {
            let (a, b) = (g.get(i, j), g.get(j, i));
            let tol = SYMMETRY_TOL * a.abs().max(b.abs()).max(scale);
            if (a - b).abs() > tol {
                report.symmetry_violations.push((i, j));
            }
            if g.get(i, i) + g.get(j, j) - (a + b) < 0.0 {
                report.clamped_distances += 1;
            }
        }
    }
    report
}

#[derive(Clone, Debug)]
enum Backing {
    Coords(PointCloud),
    Gram(GramMatrix),
}

/// Representation-agnostic access to `⟨O_i, O_j⟩`. Read-only once built.
#[derive(Clone, Debug)]
pub struct InnerProductView {
    backing: Backing,
    sq_norms: Vec<f64>,
    warnings: Vec<String>,
}

impl InnerProductView {
    pub fn from_cloud(cloud: PointCloud) -> Self {
        let sq_norms = cloud.rows().map(|r| dot_slices(r, r)).collect();
        InnerProductView {
            backing: Backing::Coords(cloud),
            sq_norms,
            warnings: Vec::new(),
        }
    }

    /// Validates the matrix, symmetrizing it when needed. Negative diagonal
    /// entries are rejected since they cannot be squared norms.
    pub fn from_gram(mut gram: GramMatrix) -> Result<Self> {
        let report = validate_gram(&gram);
        if let Some(&i) = report.negative_diagonal.first() {
            return Err(DqfError::data(format!(
                "Gram diagonal entry {i} is negative ({})",
                gram.get(i, i)
            )));
        }
        if !report.symmetry_violations.is_empty() {
            gram.symmetrize();
        }
        let sq_norms = (0..gram.n).map(|i| gram.get(i, i)).collect();
        Ok(InnerProductView {
            backing: Backing::Gram(gram),
            sq_norms,
            warnings: report.warnings(),
        })
    }

    pub fn n(&self) -> usize {
        self.sq_norms.len()
    }

    pub fn is_gram(&self) -> bool {
        matches!(self.backing, Backing::Gram(_))
    }

    pub fn cloud(&self) -> Option<&PointCloud> {
        match &self.backing {
            Backing::Coords(c) => Some(c),
            Backing::Gram(_) => None,
        }
    }

    /// Warnings gathered while building the view (symmetrization, clamping).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn check(&self, i: usize, j: usize) -> Result<()> {
        let n = self.n();
        if i >= n || j >= n {
            return Err(DqfError::usage(format!(
                "index ({i}, {j}) out of range for {n} observations"
            )));
        }
        Ok(())
    }

    pub fn dot(&self, i: usize, j: usize) -> Result<f64> {
        self.check(i, j)?;
        Ok(self.dot_unchecked(i, j))
    }

    pub fn squared_distance(&self, i: usize, j: usize) -> Result<f64> {
        self.check(i, j)?;
        Ok(self.squared_distance_unchecked(i, j))
    }

    #[inline]
    pub(crate) fn sq_norm(&self, i: usize) -> f64 {
        self.sq_norms[i]
    }

    #[inline]
    pub(crate) fn dot_unchecked(&self, i: usize, j: usize) -> f64 {
        match &self.backing {
            Backing::Coords(c) => {
                if i == j {
                    self.sq_norms[i]
                } else {
                    dot_slices(c.row(i), c.row(j))
                }
            }
            Backing::Gram(g) => g.get(i, j),
        }
    }

    #[inline]
    pub(crate) fn squared_distance_unchecked(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let d2 = self.sq_norms[i] + self.sq_norms[j] - 2.0 * self.dot_unchecked(i, j);
        d2.max(0.0)
    }
}

#[inline]
pub(crate) fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
