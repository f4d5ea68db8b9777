//! Class-conditional summary features and leave-one-out classification.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fpca::{fit_fpca, FpcaModel, DEFAULT_COMPONENTS};
use super::svm::{train_linear_svm, SvmParams};
use crate::batch::{
    all_pairs_dqf, class_list, mean_counts, BatchConfig, DqfCollection, PartnerSums, SummarySet,
};
use crate::error::{DqfError, Result};
use crate::inner_product::InnerProductView;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub batch: BatchConfig,
    /// fPCA scores kept per class block.
    pub components: usize,
    /// Fit one fPCA model on all class curves instead of one per class.
    pub fpca_joint: bool,
    pub svm: SvmParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            batch: BatchConfig::default(),
            components: DEFAULT_COMPONENTS,
            fpca_joint: false,
            svm: SvmParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LooReport {
    pub rate: f64,
    pub predictions: Vec<i64>,
    pub labels: Vec<i64>,
}

/// fPCA models per class block, or a single shared model when `joint`.
fn fit_block_models(
    blocks: &[Vec<&[f64]>],
    components: usize,
    joint: bool,
) -> Result<Vec<FpcaModel>> {
    if joint {
        let pooled: Vec<Vec<f64>> = blocks.iter().flatten().map(|c| c.to_vec()).collect();
        return Ok(vec![fit_fpca(&pooled, components)?]);
    }
    blocks
        .iter()
        .map(|b| {
            let curves: Vec<Vec<f64>> = b.iter().map(|c| c.to_vec()).collect();
            fit_fpca(&curves, components)
        })
        .collect()
}

/// Concatenated block scores in class order.
fn featurize(models: &[FpcaModel], curves: &[&[f64]]) -> Vec<f64> {
    curves
        .iter()
        .enumerate()
        .flat_map(|(c, curve)| models[c.min(models.len() - 1)].score(curve))
        .collect()
}

/// `r·m` features per observation from the class-average curves, classes in
/// ascending label order.
pub fn build_feature_vectors(
    summaries: &SummarySet,
    components: usize,
    joint: bool,
) -> Result<Vec<Vec<f64>>> {
    if summaries.class_average.is_empty() {
        return Err(DqfError::usage(
            "feature vectors need class-conditional summaries",
        ));
    }
    let blocks: Vec<Vec<&[f64]>> = summaries
        .class_average
        .iter()
        .map(|rows| rows.iter().map(Vec::as_slice).collect())
        .collect();
    let models = fit_block_models(&blocks, components, joint)?;
    Ok((0..summaries.n())
        .map(|i| {
            let curves: Vec<&[f64]> = summaries
                .class_average
                .iter()
                .map(|c| c[i].as_slice())
                .collect();
            featurize(&models, &curves)
        })
        .collect())
}

pub fn loo_classify(
    view: &InnerProductView,
    labels: &[i64],
    cfg: &PipelineConfig,
) -> Result<LooReport> {
    check_labels(view.n(), labels)?;
    let coll = all_pairs_dqf(view, &cfg.batch)?;
    loo_classify_collection(&coll, labels, cfg)
}

fn check_labels(n: usize, labels: &[i64]) -> Result<Vec<i64>> {
    if labels.len() != n {
        return Err(DqfError::usage(format!(
            "{} labels for {n} observations",
            labels.len()
        )));
    }
    if n < 4 {
        return Err(DqfError::usage(format!(
            "leave-one-out needs n ≥ 4, got {n}"
        )));
    }
    let classes = class_list(labels)?;
    if classes.len() < 2 {
        return Err(DqfError::usage("classification needs at least two classes"));
    }
    Ok(classes)
}

/// Leave-one-out over a precomputed DQF collection.
///
/// Pair functions do not depend on labels, so only label-dependent stages
/// are refit per fold. The held-out point's class averages run over all
/// partners. Training points drop their pair with the held-out point from
/// its class block, so no fold sees the held-out label.
pub fn loo_classify_collection(
    coll: &DqfCollection,
    labels: &[i64],
    cfg: &PipelineConfig,
) -> Result<LooReport> {
    let n = coll.n();
    let classes = check_labels(n, labels)?;
    let group_of: Vec<usize> = labels
        .iter()
        .map(|y| classes.binary_search(y).expect("class present"))
        .collect();
    let sums = PartnerSums::new(coll, &group_of, classes.len());

    let predictions = (0..n)
        .into_par_iter()
        .map(|i| loo_fold(coll, &sums, labels, &group_of, classes.len(), i, cfg))
        .collect::<Result<Vec<i64>>>()?;
    let hits = predictions
        .iter()
        .zip(labels)
        .filter(|(p, y)| p == y)
        .count();
    Ok(LooReport {
        rate: hits as f64 / n as f64,
        predictions,
        labels: labels.to_vec(),
    })
}

fn loo_fold(
    coll: &DqfCollection,
    sums: &PartnerSums,
    labels: &[i64],
    group_of: &[usize],
    m: usize,
    i: usize,
    cfg: &PipelineConfig,
) -> Result<i64> {
    let n = coll.n();
    let held_group = group_of[i];
    let held: Vec<Vec<f64>> = (0..m).map(|c| sums.mean(i, c)).collect();

    // rows: (curves per class, label)
    let mut rows: Vec<(Vec<Vec<f64>>, i64)> = Vec::with_capacity(n - 1);
    let mut scratch = Vec::new();
    for j in (0..n).filter(|&j| j != i) {
        let curves = (0..m)
            .map(|c| {
                if c != held_group {
                    return sums.mean(j, c);
                }
                match coll.get(j, i) {
                    Some(q) => {
                        scratch.clear();
                        scratch.extend(
                            sums.sums[j][c]
                                .iter()
                                .zip(q.grid_counts())
                                .map(|(s, v)| s - v),
                        );
                        mean_counts(&scratch, sums.counts[j][c] - 1, sums.n_total)
                    }
                    None => sums.mean(j, c),
                }
            })
            .collect();
        rows.push((curves, labels[j]));
    }
    // a canonical row order makes the refits independent of input order
    rows.sort_by(|a, b| cmp_curves(&a.0, &b.0).then(a.1.cmp(&b.1)));

    let blocks: Vec<Vec<&[f64]>> = (0..m)
        .map(|c| {
            rows.iter()
                .map(|(curves, _)| curves[c].as_slice())
                .collect()
        })
        .collect();
    let models = fit_block_models(&blocks, cfg.components, cfg.fpca_joint)?;
    let features: Vec<Vec<f64>> = rows
        .iter()
        .map(|(curves, _)| {
            let refs: Vec<&[f64]> = curves.iter().map(Vec::as_slice).collect();
            featurize(&models, &refs)
        })
        .collect();
    let train_labels: Vec<i64> = rows.iter().map(|r| r.1).collect();
    let model = train_linear_svm(&features, &train_labels, &cfg.svm)?;

    let refs: Vec<&[f64]> = held.iter().map(Vec::as_slice).collect();
    Ok(model.predict(&featurize(&models, &refs)))
}

fn cmp_curves(a: &[Vec<f64>], b: &[Vec<f64>]) -> Ordering {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::batch::{summarize, AverageScaling};
    use crate::inner_product::PointCloud;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn blobs(n_per: usize, sep: f64, seed: u64) -> (PointCloud, Vec<i64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for class in 0..2 {
            for _ in 0..n_per {
                let x: f64 = rng.random_range(-1.0..1.0);
                let y: f64 = rng.random_range(-1.0..1.0);
                rows.push(vec![x + class as f64 * sep, y]);
                labels.push(class as i64);
            }
        }
        (PointCloud::from_rows(&rows).unwrap(), labels)
    }

    #[test]
    fn feature_dimensions() {
        let (cloud, labels) = blobs(8, 10.0, 1);
        let coll = all_pairs_dqf(
            &InnerProductView::from_cloud(cloud),
            &BatchConfig::default(),
        )
        .unwrap();
        let s = summarize(&coll, Some(&labels), AverageScaling::PairCount).unwrap();
        let f = build_feature_vectors(&s, 4, false).unwrap();
        assert_eq!(f.len(), 16);
        assert!(f.iter().all(|x| x.len() == 8));
        let f = build_feature_vectors(&s, 4, true).unwrap();
        assert!(f.iter().all(|x| x.len() == 8));

        let unlabeled = summarize(&coll, None, AverageScaling::PairCount).unwrap();
        assert!(build_feature_vectors(&unlabeled, 4, false).is_err());
    }

    #[test]
    fn three_class_dimensions() {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|k| {
                vec![
                    (k % 3) as f64 * 10.0 + (k as f64 * 0.37).sin(),
                    (k as f64 * 1.3).cos(),
                ]
            })
            .collect();
        let labels: Vec<i64> = (0..12).map(|k| (k % 3) as i64).collect();
        let view = InnerProductView::from_cloud(PointCloud::from_rows(&rows).unwrap());
        let coll = all_pairs_dqf(&view, &BatchConfig::default()).unwrap();
        let s = summarize(&coll, Some(&labels), AverageScaling::PairCount).unwrap();
        let f = build_feature_vectors(&s, 4, false).unwrap();
        assert!(f.iter().all(|x| x.len() == 12));
    }

    #[test]
    fn separated_blobs() {
        let (cloud, labels) = blobs(12, 10.0, 3);
        let report = loo_classify(
            &InnerProductView::from_cloud(cloud),
            &labels,
            &PipelineConfig::default(),
        )
        .unwrap();
        assert!(report.rate >= 0.95, "rate {}", report.rate);
    }

    #[test]
    fn reordering_does_not_change_rate() {
        let (cloud, labels) = blobs(10, 1.0, 5);
        let cfg = PipelineConfig::default();
        let base =
            loo_classify(&InnerProductView::from_cloud(cloud.clone()), &labels, &cfg).unwrap();

        let n = labels.len();
        let perm: Vec<usize> = (0..n).map(|k| (k * 7 + 3) % n).collect();
        let rows: Vec<Vec<f64>> = perm.iter().map(|&k| cloud.row(k).to_vec()).collect();
        let plabels: Vec<i64> = perm.iter().map(|&k| labels[k]).collect();
        let permuted = PointCloud::from_rows(&rows).unwrap();
        let other = loo_classify(&InnerProductView::from_cloud(permuted), &plabels, &cfg).unwrap();
        assert_eq!(base.rate, other.rate);
        for (pos, &k) in perm.iter().enumerate() {
            assert_eq!(other.predictions[pos], base.predictions[k]);
        }
    }

    #[test]
    fn label_errors() {
        let (cloud, mut labels) = blobs(3, 10.0, 1);
        let view = InnerProductView::from_cloud(cloud);
        labels[0] = 9;
        assert!(matches!(
            loo_classify(&view, &labels, &PipelineConfig::default()),
            Err(DqfError::Usage(_))
        ));
        assert!(loo_classify(&view, &[0; 6], &PipelineConfig::default()).is_err());
    }
}
