//! Pairwise depth quantile functions.
//!
//! For each pair of observations a cone is placed on the line through them,
//! with its tip moving along that line. The depth of a tip position is the
//! smaller of the two cone counts, and the pair's depth quantile function
//! summarizes that depth under a random tip position. Only inner products
//! are needed, so any Gram matrix can stand in for coordinates.

pub mod analysis;
pub mod batch;
pub mod depth;
pub mod error;
pub mod inner_product;
pub mod io;
pub mod kernels;
pub mod pair_geometry;
pub mod quantile;
pub mod synthetic;

#[cfg(test)]
pub(crate) mod testutil;

pub use batch::{
    all_pairs, all_pairs_dqf, pairs_dqf, summarize, AverageScaling, BatchConfig, ConfigSnapshot,
    DqfCollection, PairCategory, SummarySet, Support,
};
pub use depth::{build_depth_profile, eval_depth, ConeConfig, DepthProfile, Side};
pub use error::{DqfError, Result};
pub use inner_product::{validate_gram, GramMatrix, GramReport, InnerProductView, PointCloud};
pub use kernels::{gram_from_kernel, sigma_sweep, KernelSpec, SigmaSweep};
pub use pair_geometry::{compute_pair_frame, PairFrame};
pub use quantile::{
    build_dqf, delta_grid, derive_support, normalize_dqf, DepthQuantileFunction, TipDistribution,
};
pub use synthetic::SynthSpec;
