//! Fixtures shared by the benchmarks.

use dqf::synthetic::gen_uniform_ball;
use dqf::{InnerProductView, PointCloud};

/// Uniform points in the unit ball, fixed seed per shape.
pub fn ball(n: usize, d: usize) -> PointCloud {
    gen_uniform_ball(n, d, 1.0, (n * 131 + d) as u64).expect("valid shape")
}

pub fn ball_view(n: usize, d: usize) -> InnerProductView {
    InnerProductView::from_cloud(ball(n, d))
}
