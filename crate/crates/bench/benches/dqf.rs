use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dqf::analysis::jacobi_eigen;
use dqf::{all_pairs_dqf, build_depth_profile, build_dqf, compute_pair_frame, derive_support};
use dqf::{BatchConfig, ConeConfig};
use dqf_bench::ball_view;

fn all_pairs(c: &mut Criterion) {
    let mut group = c.benchmark_group("all_pairs");
    group.sample_size(10);
    for (n, d) in [(100, 8), (200, 8), (200, 16)] {
        let view = ball_view(n, d);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("n{n}_d{d}")),
            &view,
            |b, v| b.iter(|| all_pairs_dqf(v, &BatchConfig::default()).unwrap()),
        );
    }
    group.finish();
}

fn single_pair(c: &mut Criterion) {
    let mut group = c.benchmark_group("single_pair");
    let cone = ConeConfig::default();
    for n in [1_000, 10_000] {
        let view = ball_view(n, 8);
        group.bench_with_input(BenchmarkId::new("frame_profile_dqf", n), &view, |b, v| {
            b.iter(|| {
                let frame = compute_pair_frame(v, 0, 1).unwrap();
                let profile = build_depth_profile(&frame, &cone).unwrap();
                let g = derive_support([profile.max_reach], 1.1).unwrap();
                build_dqf(&profile, &g, 100)
            })
        });
    }
    group.finish();
}

fn eigen(c: &mut Criterion) {
    let m = 100;
    // covariance-like: a smooth kernel on the grid
    let a: Vec<f64> = (0..m * m)
        .map(|k| {
            let (r, s) = ((k / m) as f64, (k % m) as f64);
            (-(r - s).powi(2) / 200.0).exp()
        })
        .collect();
    c.bench_function("jacobi_100", |b| b.iter(|| jacobi_eigen(&a, m).unwrap()));
}

criterion_group!(benches, all_pairs, single_pair, eigen);
criterion_main!(benches);
