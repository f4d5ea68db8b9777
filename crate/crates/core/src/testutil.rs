use crate::inner_product::{InnerProductView, PointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Four points in the plane used throughout the hand-checked examples.
pub fn h4_cloud() -> PointCloud {
    let rows = vec![
        vec![2.0, 0.0],
        vec![0.0, 0.0],
        vec![1.2, 0.3],
        vec![0.6, 0.2],
    ];
    PointCloud::from_rows(&rows).unwrap()
}

pub fn h4() -> InnerProductView {
    InnerProductView::from_cloud(h4_cloud())
}

pub fn random_cloud(n: usize, d: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    PointCloud::new(n, d, coords).unwrap()
}
