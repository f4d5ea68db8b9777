//! Soft-margin linear SVM trained by seeded stochastic subgradient descent on
//! the primal hinge objective, with iterate averaging. Features are
//! standardized internally and a constant column stands in for the bias.
//! More than two classes are handled by one-vs-one voting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DqfError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub cost: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            cost: 1.0,
            epochs: 200,
            seed: 0,
        }
    }
}

/// Binary separator `sign(w·x + b)` in the original feature coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Label predicted when `w·x + b > 0`.
    pub positive: i64,
    pub negative: i64,
}

impl LinearSvm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> i64 {
        if self.decision(x) > 0.0 {
            self.positive
        } else {
            self.negative
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClassifierModel {
    Svm {
        classes: Vec<i64>,
        /// One model per class pair `(a, b)`, `a < b`, in lexicographic order.
        machines: Vec<LinearSvm>,
        params: SvmParams,
    },
    Knn {
        k: usize,
        features: Vec<Vec<f64>>,
        labels: Vec<i64>,
    },
}

impl ClassifierModel {
    pub fn predict(&self, x: &[f64]) -> i64 {
        match self {
            ClassifierModel::Svm {
                classes, machines, ..
            } => {
                if machines.len() == 1 {
                    return machines[0].predict(x);
                }
                let mut votes = vec![0usize; classes.len()];
                for m in machines {
                    let winner = m.predict(x);
                    let idx = classes.binary_search(&winner).expect("known class");
                    votes[idx] += 1;
                }
                // ties go to the smallest label
                let best = votes.iter().copied().max().unwrap_or(0);
                classes[votes.iter().position(|&v| v == best).unwrap_or(0)]
            }
            ClassifierModel::Knn {
                k,
                features,
                labels,
            } => super::knn::knn_predict(features, labels, x, *k, None),
        }
    }
}

/// Regularized hinge objective `λ/2‖w‖² + mean(max(0, 1 − y·w·x))` in the
/// standardized, bias-augmented coordinates.
fn objective(w: &[f64], xs: &[Vec<f64>], ys: &[f64], lambda: f64) -> f64 {
    let reg = 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>();
    let hinge: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (1.0 - y * dot(w, x)).max(0.0))
        .sum();
    reg + hinge / xs.len() as f64
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Binary training run; `trace` receives the averaged iterate's objective
/// after every epoch.
pub(crate) fn train_binary(
    features: &[Vec<f64>],
    targets: &[f64],
    params: &SvmParams,
    seed: u64,
    mut trace: Option<&mut Vec<f64>>,
) -> (Vec<f64>, f64) {
    let n = features.len();
    let dim = features[0].len();

    let mut mean = vec![0.0; dim];
    for x in features {
        for (m, v) in mean.iter_mut().zip(x) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut sd = vec![0.0; dim];
    for x in features {
        for ((s, v), m) in sd.iter_mut().zip(x).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    sd.iter_mut().for_each(|s| {
        *s = (*s / n as f64).sqrt();
        if s.is_nan() || *s <= 1e-12 {
            *s = 1.0;
        }
    });
    let xs: Vec<Vec<f64>> = features
        .iter()
        .map(|x| {
            let mut z: Vec<f64> = x
                .iter()
                .zip(&mean)
                .zip(&sd)
                .map(|((v, m), s)| (v - m) / s)
                .collect();
            z.push(1.0);
            z
        })
        .collect();

    let lambda = 1.0 / (params.cost * n as f64);
    let radius = 1.0 / lambda.sqrt();
    let mut w = vec![0.0; dim + 1];
    let mut avg = vec![0.0; dim + 1];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0usize;
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &k in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let margin = targets[k] * dot(&w, &xs[k]);
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|v| *v *= shrink);
            if margin < 1.0 {
                for (v, x) in w.iter_mut().zip(&xs[k]) {
                    *v += eta * targets[k] * x;
                }
            }
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > radius {
                let f = radius / norm;
                w.iter_mut().for_each(|v| *v *= f);
            }
            let inv = 1.0 / t as f64;
            for (a, v) in avg.iter_mut().zip(&w) {
                *a += (v - *a) * inv;
            }
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(objective(&avg, &xs, targets, lambda));
        }
    }

    // back to raw feature coordinates
    let weights: Vec<f64> = avg[..dim].iter().zip(&sd).map(|(a, s)| a / s).collect();
    let bias = avg[dim] - weights.iter().zip(&mean).map(|(w, m)| w * m).sum::<f64>();
    (weights, bias)
}

fn check_training_set(features: &[Vec<f64>], labels: &[i64]) -> Result<Vec<i64>> {
    if features.len() != labels.len() {
        return Err(DqfError::usage(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let dim = features.first().map_or(0, Vec::len);
    if dim == 0 || features.iter().any(|x| x.len() != dim) {
        return Err(DqfError::usage(
            "feature rows must be non-empty and of equal length",
        ));
    }
    if features.iter().flatten().any(|v| !v.is_finite()) {
        return Err(DqfError::numeric("non-finite feature value"));
    }
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(DqfError::usage("SVM training needs at least two classes"));
    }
    Ok(classes)
}

pub fn train_linear_svm(
    features: &[Vec<f64>],
    labels: &[i64],
    params: &SvmParams,
) -> Result<ClassifierModel> {
    let classes = check_training_set(features, labels)?;
    if params.cost.is_nan() || params.cost <= 0.0 || params.epochs == 0 {
        return Err(DqfError::usage("SVM cost and epochs must be positive"));
    }
    let mut machines = Vec::new();
    for (a_idx, &a) in classes.iter().enumerate() {
        for &b in &classes[a_idx + 1..] {
            let (xs, ys): (Vec<Vec<f64>>, Vec<f64>) = features
                .iter()
                .zip(labels)
                .filter(|(_, &y)| y == a || y == b)
                .map(|(x, &y)| (x.clone(), if y == b { 1.0 } else { -1.0 }))
                .unzip();
            let seed = params
                .seed
                .wrapping_add((machines.len() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let (weights, bias) = train_binary(&xs, &ys, params, seed, None);
            machines.push(LinearSvm {
                weights,
                bias,
                positive: b,
                negative: a,
            });
        }
    }
    Ok(ClassifierModel::Svm {
        classes,
        machines,
        params: *params,
    })
}

pub fn accuracy(model: &ClassifierModel, features: &[Vec<f64>], labels: &[i64]) -> f64 {
    let hits = features
        .iter()
        .zip(labels)
        .filter(|(x, &y)| model.predict(x) == y)
        .count();
    hits as f64 / labels.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn separable_line() {
        let xs = vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]];
        let ys = vec![0, 0, 1, 1];
        let model = train_linear_svm(&xs, &ys, &SvmParams::default()).unwrap();
        assert_eq!(accuracy(&model, &xs, &ys), 1.0);
    }

    #[test]
    fn contradictory_points() {
        let xs = vec![
            vec![0.5, 0.5],
            vec![0.5, 0.5],
            vec![-3.0, 1.0],
            vec![3.0, -1.0],
        ];
        let ys = vec![0, 1, 0, 1];
        let model = train_linear_svm(&xs, &ys, &SvmParams::default()).unwrap();
        assert_eq!(accuracy(&model, &xs[..2], &ys[..2]), 0.5);
    }

    #[test]
    fn seeded_runs_are_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<Vec<f64>> = (0..40)
            .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        let ys: Vec<i64> = xs
            .iter()
            .map(|x| (x[0] + 0.3 * x[1] > 0.1) as i64)
            .collect();
        let p = SvmParams {
            seed: 11,
            ..SvmParams::default()
        };
        let a = train_linear_svm(&xs, &ys, &p).unwrap();
        let b = train_linear_svm(&xs, &ys, &p).unwrap();
        assert_eq!(a, b);
        assert!(accuracy(&a, &xs, &ys) >= 0.9);
    }

    #[test]
    fn multiclass_one_vs_one() {
        let centers = [(-5.0, 0.0), (5.0, 0.0), (0.0, 6.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (c, &(cx, cy)) in centers.iter().enumerate() {
            for _ in 0..15 {
                xs.push(vec![
                    cx + rng.random_range(-1.0..1.0),
                    cy + rng.random_range(-1.0..1.0),
                ]);
                ys.push(c as i64 + 10);
            }
        }
        let model = train_linear_svm(&xs, &ys, &SvmParams::default()).unwrap();
        match &model {
            ClassifierModel::Svm { machines, .. } => assert_eq!(machines.len(), 3),
            _ => unreachable!(),
        }
        assert_eq!(accuracy(&model, &xs, &ys), 1.0);
    }

    #[test]
    fn averaged_objective_does_not_increase() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let xs: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| {
                if x[0] - x[2] + 0.2 * rng.random_range(-1.0..1.0) > 0.0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        let mut trace = Vec::new();
        train_binary(&xs, &ys, &SvmParams::default(), 1, Some(&mut trace));
        assert_eq!(trace.len(), 200);
        for w in trace.chunks(10).collect::<Vec<_>>().windows(2) {
            let (prev, next) = (w[0].last().unwrap(), w[1].last().unwrap());
            assert!(next <= &(prev + 1e-6), "{next} > {prev}");
        }
    }

    #[test]
    fn training_errors() {
        let xs = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            train_linear_svm(&xs, &[1, 1], &SvmParams::default()),
            Err(DqfError::Usage(_))
        ));
        assert!(train_linear_svm(&xs, &[1], &SvmParams::default()).is_err());
        assert!(matches!(
            train_linear_svm(&[vec![f64::NAN], vec![1.0]], &[0, 1], &SvmParams::default()),
            Err(DqfError::Numeric(_))
        ));
    }
}
