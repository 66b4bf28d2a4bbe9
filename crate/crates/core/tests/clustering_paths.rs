mod common;

use admm_paths::cvxcluster::{
    clustering_algorithmic_path, extract_clusters, gaussian_knn_weights, ConvexClustering,
    PairWeights,
};
use admm_paths::datagen::{gen_halfmoons, SimSpec};
use admm_paths::path_engine::{algorithmic_path, SplitProblem, StepSchedule, Termination};
use common::*;
use ndarray::{Array2, Axis};
use proptest::prelude::*;
use rand::seq::SliceRandom;

/// Dense oracle for the centroid step: `(I + DᵀD) B = Y + Dᵀ(Z − U)` with D
/// the signed edge-incidence matrix.
fn centroid_oracle(
    y: &Array2<f64>,
    w: &PairWeights,
    z: &Array2<f64>,
    u: &Array2<f64>,
) -> Array2<f64> {
    let n = y.nrows();
    let mut d = Array2::<f64>::zeros((w.len(), n));
    for (k, e) in w.edges().iter().enumerate() {
        d[[k, e.i]] = 1.0;
        d[[k, e.j]] = -1.0;
    }
    let lhs = Array2::<f64>::eye(n) + d.t().dot(&d);
    let rhs = y + &d.t().dot(&(z - u));
    dense_solve(&lhs, &rhs)
}

fn complete(n: usize) -> PairWeights {
    PairWeights::new(
        n,
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j, 1.0))),
    )
    .unwrap()
}

#[test]
fn centroid_step_matches_normal_equations() {
    let mut r = rng(3);
    let y = gaussian(&mut r, 7, 3);
    let knn = gaussian_knn_weights(y.view(), 2, 0.5).unwrap();
    assert!(!knn.is_complete());
    for w in [complete(7), knn] {
        let z = gaussian(&mut r, w.len(), 3);
        let u = gaussian(&mut r, w.len(), 3);
        let prob = ConvexClustering::new(y.clone(), w.clone()).unwrap();
        let b = prob.centroid_step(z.view(), u.view()).unwrap();
        let expected = centroid_oracle(&y, &w, &z, &u);
        assert!(
            max_abs_diff(&b, &expected) < 1e-12,
            "complete = {}",
            w.is_complete()
        );
    }
}

#[test]
fn edge_input_order_does_not_matter() {
    let h = gen_halfmoons(&SimSpec::halfmoons(30, 4)).unwrap();
    let w = gaussian_knn_weights(h.points.view(), 4, 0.5).unwrap();
    let mut triples: Vec<(usize, usize, f64)> = w.edges().iter().map(|e| (e.j, e.i, e.w)).collect();
    triples.shuffle(&mut rng(8));
    let shuffled = PairWeights::new(w.n(), triples).unwrap();
    let sched = StepSchedule::geometric(0.01, 1.1, 5000).unwrap();
    let a =
        clustering_algorithmic_path(&ConvexClustering::new(h.points.clone(), w).unwrap(), &sched)
            .unwrap();
    let b = clustering_algorithmic_path(
        &ConvexClustering::new(h.points.clone(), shuffled).unwrap(),
        &sched,
    )
    .unwrap();
    assert_eq!(a.path.points.len(), b.path.points.len());
    for (p, q) in a.path.points.iter().zip(&b.path.points) {
        assert_eq!(p.gamma.to_bits(), q.gamma.to_bits());
        assert!(p
            .z
            .iter()
            .zip(q.z.iter())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }
    assert_eq!(a.assignments, b.assignments);
}

#[test]
fn halfmoon_knn_graph_is_connected() {
    for seed in 1..=5u64 {
        let h = gen_halfmoons(&SimSpec::halfmoons(50, seed)).unwrap();
        let w = gaussian_knn_weights(h.points.view(), 5, 0.5).unwrap();
        assert_eq!(w.components().cluster_count, 1, "seed {seed}");
    }
}

#[test]
fn centroids_coalesce_at_the_mean() {
    let h = gen_halfmoons(&SimSpec::halfmoons(50, 1)).unwrap();
    let w = gaussian_knn_weights(h.points.view(), 5, 0.5).unwrap();
    let prob = ConvexClustering::new(h.points.clone(), w).unwrap();
    let sched = StepSchedule::geometric(0.01, 1.05, 5000).unwrap();
    let path = algorithmic_path(&prob, &sched).unwrap();
    assert_eq!(path.terminated, Termination::FullySparse);

    // replay the rounds to recover the centroids
    let shape = prob.split_shape();
    let mut z = Array2::<f64>::zeros(shape);
    let mut u = Array2::<f64>::zeros(shape);
    let mut gamma = sched.gamma0;
    let mut dist = Vec::new();
    for pt in &path.points {
        gamma = sched.advance(gamma);
        let b = prob.centroid_step(z.view(), u.view()).unwrap();
        z = prob.fusion_z_step(b.view(), u.view(), gamma).unwrap();
        u = u + &prob.constraint(&b) - &z;
        assert!(z
            .iter()
            .zip(pt.z.iter())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
        let worst = b
            .axis_iter(Axis(0))
            .map(|row| {
                let d = &row - prob.mean();
                d.dot(&d).sqrt()
            })
            .fold(0.0, f64::max);
        dist.push(worst);
    }
    let tail = &dist[dist.len() - 10..];
    assert!(tail.windows(2).all(|w| w[1] <= w[0]), "{tail:?}");
    assert!(tail[9] < tail[0]);
    let last = path.last().unwrap();
    assert_eq!(
        extract_clusters(last.z.view(), prob.weights()).cluster_count,
        1
    );
}

#[test]
fn disconnected_graph_ends_with_its_components() {
    let y = ndarray::array![[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [5.1, 5.0], [5.0, 5.2]];
    let w = PairWeights::new(5, vec![(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0)]).unwrap();
    let prob = ConvexClustering::new(y, w).unwrap();
    let cp = clustering_algorithmic_path(&prob, &StepSchedule::geometric(0.01, 1.1, 5000).unwrap())
        .unwrap();
    assert!(cp.is_disconnected());
    assert_eq!(cp.path.terminated, Termination::FullySparse);
    let fin = cp.final_assignment().unwrap();
    assert_eq!(fin.cluster_count, 2);
    assert_eq!(fin.labels, vec![0, 0, 1, 1, 1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extracted_clusters_partition_the_points(
        n in 2usize..12,
        raw in proptest::collection::vec((0usize..12, 0usize..12, any::<bool>()), 0..30),
    ) {
        let mut seen = std::collections::BTreeSet::new();
        let mut pairs = Vec::new();
        let mut fused = Vec::new();
        for (a, b, zero) in raw {
            let (a, b) = (a % n, b % n);
            if a == b || !seen.insert((a.min(b), a.max(b))) {
                continue;
            }
            pairs.push((a.min(b), a.max(b), 1.0));
            fused.push(((a.min(b), a.max(b)), zero));
        }
        let w = PairWeights::new(n, pairs).unwrap();
        let mut z = Array2::<f64>::ones((w.len(), 2));
        for (k, e) in w.edges().iter().enumerate() {
            let zero = fused.iter().find(|f| f.0 == (e.i, e.j)).unwrap().1;
            if zero {
                z.row_mut(k).fill(0.0);
            }
        }
        let a = extract_clusters(z.view(), &w);
        prop_assert_eq!(a.labels.len(), n);
        prop_assert!(a.labels.iter().all(|&l| l < a.cluster_count));
        let mut used = vec![false; a.cluster_count];
        for &l in &a.labels { used[l] = true; }
        prop_assert!(used.iter().all(|&u| u));
        // labels appear in first-visit order
        let mut next = 0;
        for &l in &a.labels {
            prop_assert!(l <= next);
            if l == next { next += 1; }
        }
        for (k, e) in w.edges().iter().enumerate() {
            if z.row(k).iter().all(|&v| v == 0.0) {
                prop_assert_eq!(a.labels[e.i], a.labels[e.j]);
            }
        }
        let members: usize = a.clusters().iter().map(|c| c.len()).sum();
        prop_assert_eq!(members, n);
    }
}
