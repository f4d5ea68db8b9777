//! Downstream statistics on summary functions.

pub mod anomaly;
pub mod classify;
pub mod eigen;
pub mod fpca;
pub mod knn;
pub mod svm;

pub use anomaly::{anomaly_scores, roc_auc, snap_to_grid, AnomalyReport, DEFAULT_DELTA_STAR};
pub use classify::{
    build_feature_vectors, loo_classify, loo_classify_collection, LooReport, PipelineConfig,
};
pub use eigen::{jacobi_eigen, SymmetricEigen};
pub use fpca::{fit_fpca, FpcaModel, DEFAULT_COMPONENTS};
pub use knn::{knn_loo, knn_predict};
pub use svm::{accuracy, train_linear_svm, ClassifierModel, LinearSvm, SvmParams};
