use dqf::analysis::roc_auc;
use dqf::batch::{summarize, AverageScaling, PairCategory};
use dqf::{
    all_pairs_dqf, build_depth_profile, compute_pair_frame, eval_depth, gram_from_kernel,
    BatchConfig, ConeConfig, DqfCollection, InnerProductView, KernelSpec, PointCloud, Support,
};
use proptest::prelude::*;

fn cloud_strategy(max_n: usize, max_d: usize) -> impl Strategy<Value = PointCloud> {
    (4..=max_n, 1..=max_d).prop_flat_map(|(n, d)| {
        prop::collection::vec(-10.0f64..10.0, n * d)
            .prop_map(move |coords| PointCloud::new(n, d, coords).unwrap())
    })
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn same_grids(a: &DqfCollection, b: &DqfCollection) -> bool {
    let n = a.n();
    (0..n).all(|i| {
        (i + 1..n)
            .all(|j| a.get(i, j).map(|q| &q.grid_values) == b.get(i, j).map(|q| &q.grid_values))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mirror_identity(cloud in cloud_strategy(12, 4), alpha in 20.0f64..170.0) {
        let view = InnerProductView::from_cloud(cloud.clone());
        let cone = ConeConfig::new(alpha).unwrap();
        let (Ok(fij), Ok(fji)) = (compute_pair_frame(&view, 0, 1), compute_pair_frame(&view, 1, 0)) else {
            return Ok(());
        };
        let pij = build_depth_profile(&fij, &cone).unwrap();
        let pji = build_depth_profile(&fji, &cone).unwrap();
        for t in -50..=50 {
            let s = t as f64 * 0.37 + 0.011;
            prop_assert_eq!(eval_depth(&pij, s), eval_depth(&pji, -s));
        }
    }

    #[test]
    fn depth_monotone_on_each_branch(cloud in cloud_strategy(15, 3), alpha in 20.0f64..170.0) {
        let view = InnerProductView::from_cloud(cloud);
        let Ok(frame) = compute_pair_frame(&view, 0, 2) else { return Ok(()) };
        let p = build_depth_profile(&frame, &ConeConfig::new(alpha).unwrap()).unwrap();
        let steps: Vec<f64> = (0..=400).map(|t| t as f64 * 0.1).collect();
        for w in steps.windows(2) {
            prop_assert!(eval_depth(&p, w[0]) <= eval_depth(&p, w[1]));
            prop_assert!(eval_depth(&p, -w[0]) <= eval_depth(&p, -w[1]));
        }
    }

    #[test]
    fn pythagoras(cloud in cloud_strategy(10, 5)) {
        let view = InnerProductView::from_cloud(cloud.clone());
        let Ok(f) = compute_pair_frame(&view, 0, 1) else { return Ok(()) };
        let mid: Vec<f64> = cloud.row(0).iter().zip(cloud.row(1)).map(|(a, b)| 0.5 * (a + b)).collect();
        for k in 0..cloud.n() {
            let r2 = dist2(cloud.row(k), &mid);
            let got = f.z1[k] * f.z1[k] + f.z2[k] * f.z2[k];
            prop_assert!((got - r2).abs() <= 1e-8 * (1.0 + r2), "k={k}: {got} vs {r2}");
        }
    }

    #[test]
    fn quantile_functions_are_monotone_and_bounded(cloud in cloud_strategy(12, 3)) {
        let view = InnerProductView::from_cloud(cloud);
        let Ok(coll) = all_pairs_dqf(&view, &BatchConfig::default()) else { return Ok(()) };
        for q in coll.iter() {
            prop_assert!(q.grid_values.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(q.grid_values[0] >= 0.0);
            prop_assert!((q.eval(1.0) - q.at_one()).abs() == 0.0);
        }
    }

    #[test]
    fn linear_gram_matches_coordinates(cloud in cloud_strategy(10, 4)) {
        let coords = all_pairs_dqf(&InnerProductView::from_cloud(cloud.clone()), &BatchConfig::default());
        let gram = gram_from_kernel(&cloud, KernelSpec::Linear).unwrap();
        let via_gram = all_pairs_dqf(&InnerProductView::from_gram(gram).unwrap(), &BatchConfig::default());
        if let (Ok(a), Ok(b)) = (coords, via_gram) {
            let n = a.n();
            for i in 0..n {
                for j in i + 1..n {
                    if let (Some(p), Some(q)) = (a.get(i, j), b.get(i, j)) {
                        for (x, y) in p.grid_values.iter().zip(&q.grid_values) {
                            prop_assert!((x - y).abs() <= 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rank_auc_matches_pair_counting(
        scores in prop::collection::vec(0u8..12, 2..300),
        flags in prop::collection::vec(any::<bool>(), 300),
    ) {
        let n = scores.len();
        let s: Vec<f64> = scores.iter().map(|&v| v as f64 * 0.5).collect();
        let mut pos = flags[..n].to_vec();
        pos[0] = true;
        pos[n - 1] = false;
        let (mut wins, mut total) = (0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                if pos[a] && !pos[b] {
                    total += 1.0;
                    wins += if s[a] > s[b] { 1.0 } else if s[a] == s[b] { 0.5 } else { 0.0 };
                }
            }
        }
        prop_assert_eq!(roc_auc(&s, &pos).unwrap(), wins / total);
    }
}

fn seeded_cloud(n: usize, d: usize, seed: u64) -> PointCloud {
    dqf::synthetic::gen_uniform_ball(n, d, 1.0, seed).unwrap()
}

#[test]
fn worker_count_does_not_change_results() {
    let view = InnerProductView::from_cloud(seeded_cloud(60, 5, 9));
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| all_pairs_dqf(&view, &BatchConfig::default()).unwrap())
    };
    let (one, four) = (run(1), run(4));
    assert!(same_grids(&one, &four));
    assert_eq!(one.config, four.config);
}

#[test]
fn relabeling_permutes_summaries() {
    let n = 24;
    let cloud = seeded_cloud(n, 3, 2);
    let labels: Vec<i64> = (0..n).map(|k| (k % 3) as i64).collect();
    let perm: Vec<usize> = (0..n).map(|k| (k * 5 + 7) % n).collect();
    let rows: Vec<Vec<f64>> = perm.iter().map(|&k| cloud.row(k).to_vec()).collect();
    let plabels: Vec<i64> = perm.iter().map(|&k| labels[k]).collect();

    let base = all_pairs_dqf(
        &InnerProductView::from_cloud(cloud),
        &BatchConfig::default(),
    )
    .unwrap();
    let moved = all_pairs_dqf(
        &InnerProductView::from_cloud(PointCloud::from_rows(&rows).unwrap()),
        &BatchConfig {
            support: Support::Fixed(base.config.tip),
            ..BatchConfig::default()
        },
    )
    .unwrap();
    assert_eq!(moved.config.tip, base.config.tip);
    let s = summarize(&base, Some(&labels), AverageScaling::PairCount).unwrap();
    let t = summarize(&moved, Some(&plabels), AverageScaling::PairCount).unwrap();
    for (pos, &k) in perm.iter().enumerate() {
        assert_eq!(t.average[pos], s.average[k]);
        for c in 0..3 {
            assert_eq!(t.class_average[c][pos], s.class_average[c][k]);
        }
    }
}

#[test]
fn class_averages_match_direct_means() {
    let n = 18;
    let cloud = seeded_cloud(n, 2, 5);
    let labels: Vec<i64> = (0..n).map(|k| i64::from(k % 3 == 0)).collect();
    let coll = all_pairs_dqf(
        &InnerProductView::from_cloud(cloud),
        &BatchConfig::default(),
    )
    .unwrap();
    let s = summarize(&coll, Some(&labels), AverageScaling::PairCount).unwrap();
    for i in 0..n {
        for (c, &class) in s.classes.iter().enumerate() {
            let partners: Vec<usize> = (0..n).filter(|&j| j != i && labels[j] == class).collect();
            for m in 0..s.grid.len() {
                let mean = partners
                    .iter()
                    .map(|&j| coll.get(i, j).unwrap().grid_values[m])
                    .sum::<f64>()
                    / partners.len() as f64;
                assert!((s.class_average[c][i][m] - mean).abs() < 1e-12);
            }
        }
        for j in 0..n {
            if i != j {
                let cat = s.pair_category(i, j).unwrap();
                assert_eq!(cat, s.pair_category(j, i).unwrap());
                assert_eq!(cat == PairCategory::Within, labels[i] == labels[j]);
            }
        }
    }
}
