//! Convex clustering by pairwise fusion.
//!
//! Minimizes `½Σᵢ‖yᵢ − βᵢ‖² + λ Σ_{(i,j)} w_ij ‖βᵢ − βⱼ‖₂` over the edges of
//! a weight graph, split as `βᵢ − βⱼ = z_ij`. The dual `u_ij` is kept in the
//! standard scaled form, so the dual step is the engine's `u + Aβ − z` with
//! `(Aβ)_ij = βᵢ − βⱼ`.
//!
//! Clusters are read off z: points i and j are linked when `z_ij` is exactly
//! zero, and each connected component of that graph is one cluster.

use std::collections::VecDeque;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::active_set::ActiveSet;
pub use crate::active_set::ClusterAssignment;
use crate::error::{Error, Result};
use crate::linalg::{all_finite, SpdFactor};
use crate::path_engine::{
    algorithmic_path, geometric_grid, warm_start_path, Path, ProblemKind, ScheduleKind,
    SplitProblem, StepSchedule, WarmStartOptions,
};
use crate::prox::group_factor;

pub const DEFAULT_GAMMA0: f64 = 0.01;
pub const DEFAULT_MAX_STEPS: usize = 5000;
pub const DEFAULT_NEIGHBORS: usize = 5;
pub const DEFAULT_PHI: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Positive weights on pairs `i < j`, sorted by `(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairWeights {
    n: usize,
    edges: Vec<Edge>,
}

impl PairWeights {
    /// Validates and canonicalizes the edge list. Pairs given as `(j, i)`
    /// with `j > i` are flipped; zero weights are dropped.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut out = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::invalid(format!(
                    "self-pair ({a}, {b}) is not allowed"
                )));
            }
            if a >= n || b >= n {
                return Err(Error::invalid(format!(
                    "pair ({a}, {b}) out of range for n = {n}"
                )));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::invalid(format!(
                    "weight {w} on ({a}, {b}) must be finite and >= 0"
                )));
            }
            if w == 0.0 {
                continue;
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            out.push(Edge { i, j, w });
        }
        out.sort_by_key(|e| (e.i, e.j));
        if out.windows(2).any(|p| (p[0].i, p[0].j) == (p[1].i, p[1].j)) {
            return Err(Error::invalid("duplicate pair in weights"));
        }
        Ok(PairWeights { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// True when every pair `i < j` carries a weight.
    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Connected components of the weight graph itself.
    pub fn components(&self) -> ClusterAssignment {
        bfs_components(self.n, self.edges.iter().map(|e| (e.i, e.j)))
    }
}

fn sq_dist(y: ArrayView2<'_, f64>, a: usize, b: usize) -> f64 {
    y.row(a)
        .iter()
        .zip(y.row(b).iter())
        .map(|(u, v)| (u - v) * (u - v))
        .sum()
}

/// Sparse Gaussian kernel weights: `w_ij = exp(−φ‖yᵢ − yⱼ‖²)` kept only when
/// j is among the k nearest neighbours of i or vice versa.
///
/// Distance ties are broken by index so the graph is deterministic.
pub fn gaussian_knn_weights(y: ArrayView2<'_, f64>, k: usize, phi: f64) -> Result<PairWeights> {
    let n = y.nrows();
    if k < 1 || k >= n {
        return Err(Error::invalid(format!(
            "k must satisfy 1 <= k < n = {n}, got {k}"
        )));
    }
    if !(phi.is_finite() && phi >= 0.0) {
        return Err(Error::invalid(format!(
            "phi must be finite and >= 0, got {phi}"
        )));
    }
    if !all_finite(y.iter()) {
        return Err(Error::invalid("data contains non-finite entries"));
    }
    let mut keep = vec![false; n * n];
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (sq_dist(y, i, j), j))
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in others.iter().take(k) {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            keep[a * n + b] = true;
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if keep[i * n + j] {
                // exp underflow to 0 would silently drop the edge
                let w = (-phi * sq_dist(y, i, j)).exp().max(f64::MIN_POSITIVE);
                edges.push((i, j, w));
            }
        }
    }
    PairWeights::new(n, edges)
}

fn bfs_components(n: usize, links: impl Iterator<Item = (usize, usize)>) -> ClusterAssignment {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j) in links {
        adj[i].push(j);
        adj[j].push(i);
    }
    const UNSEEN: usize = usize::MAX;
    let mut labels = vec![UNSEEN; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if labels[start] != UNSEEN {
            continue;
        }
        labels[start] = count;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if labels[w] == UNSEEN {
                    labels[w] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    ClusterAssignment {
        labels,
        cluster_count: count,
    }
}

/// Clusters from the zero pattern of z (one row per edge of `weights`).
pub fn extract_clusters(z: ArrayView2<'_, f64>, weights: &PairWeights) -> ClusterAssignment {
    debug_assert_eq!(z.nrows(), weights.len());
    let fused = weights
        .edges()
        .iter()
        .zip(z.axis_iter(Axis(0)))
        .filter(|(_, row)| row.iter().all(|&v| v == 0.0))
        .map(|(e, _)| (e.i, e.j));
    bfs_components(weights.n(), fused)
}

#[derive(Debug, Clone)]
enum CentroidSolver {
    /// Every pair is constrained: `(I + L)⁻¹` has a closed form.
    Complete,
    /// Cached factor of `I + L` for the weight-graph Laplacian `L`.
    Laplacian(SpdFactor),
}

/// Convex clustering instance over a fixed weight graph.
#[derive(Debug, Clone)]
pub struct ConvexClustering {
    y: Array2<f64>,
    weights: PairWeights,
    y_mean: Array1<f64>,
    solver: CentroidSolver,
}

impl ConvexClustering {
    pub fn new(y: Array2<f64>, weights: PairWeights) -> Result<Self> {
        let (n, p) = y.dim();
        if n == 0 || p == 0 {
            return Err(Error::invalid(
                "clustering needs at least one point and one feature",
            ));
        }
        if weights.n() != n {
            return Err(Error::dims(format!(
                "weights are for {} points, data has {n}",
                weights.n()
            )));
        }
        if !all_finite(y.iter()) {
            return Err(Error::invalid("data contains non-finite entries"));
        }
        let y_mean = y.mean_axis(Axis(0)).expect("n >= 1");
        let solver = if weights.is_complete() {
            CentroidSolver::Complete
        } else {
            let mut m = Array2::<f64>::eye(n);
            for e in weights.edges() {
                m[[e.i, e.i]] += 1.0;
                m[[e.j, e.j]] += 1.0;
                m[[e.i, e.j]] -= 1.0;
                m[[e.j, e.i]] -= 1.0;
            }
            CentroidSolver::Laplacian(SpdFactor::new(m.view())?)
        };
        Ok(ConvexClustering {
            y,
            weights,
            y_mean,
            solver,
        })
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn dim(&self) -> usize {
        self.y.ncols()
    }

    pub fn weights(&self) -> &PairWeights {
        &self.weights
    }

    pub fn data(&self) -> ArrayView2<'_, f64> {
        self.y.view()
    }

    pub fn mean(&self) -> &Array1<f64> {
        &self.y_mean
    }

    /// Centroid update: argmin over B of
    /// `½Σ‖yᵢ − βᵢ‖² + ½Σ_{(i,j)}‖βᵢ − βⱼ − z_ij + u_ij‖²`.
    ///
    /// On a complete pair graph this is the explicit per-point formula
    /// `βᵢ = [yᵢ + nȳ + Σ_{j>i} c_ij − Σ_{j<i} c_ji] / (1 + n)` with
    /// `c = z − u`; otherwise the cached `I + L` factor is used.
    pub fn centroid_step(
        &self,
        z: ArrayView2<'_, f64>,
        u: ArrayView2<'_, f64>,
    ) -> Result<Array2<f64>> {
        let shape = (self.weights.len(), self.dim());
        if z.dim() != shape || u.dim() != shape {
            return Err(Error::dims(format!(
                "Z and U must be {}x{}, got {:?} and {:?}",
                shape.0,
                shape.1,
                z.dim(),
                u.dim()
            )));
        }
        let n = self.n();
        let mut rhs = self.y.clone();
        for (e, (zr, ur)) in self
            .weights
            .edges()
            .iter()
            .zip(z.axis_iter(Axis(0)).zip(u.axis_iter(Axis(0))))
        {
            let c = &zr - &ur;
            {
                let mut ri = rhs.row_mut(e.i);
                ri += &c;
            }
            let mut rj = rhs.row_mut(e.j);
            rj -= &c;
        }
        match &self.solver {
            CentroidSolver::Complete => {
                let nf = n as f64;
                let shift = &self.y_mean * nf;
                for mut row in rhs.axis_iter_mut(Axis(0)) {
                    row += &shift;
                    row /= 1.0 + nf;
                }
                Ok(rhs)
            }
            CentroidSolver::Laplacian(f) => f.solve_mat(rhs.view()),
        }
    }

    fn differences(&self, b: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut d = Array2::<f64>::zeros((self.weights.len(), self.dim()));
        for (e, mut row) in self.weights.edges().iter().zip(d.axis_iter_mut(Axis(0))) {
            row.assign(&(&b.row(e.i) - &b.row(e.j)));
        }
        d
    }

    /// `z_ij = S(βᵢ − βⱼ + u_ij, γ w_ij)` for every edge.
    pub fn fusion_z_step(
        &self,
        b: ArrayView2<'_, f64>,
        u: ArrayView2<'_, f64>,
        gamma: f64,
    ) -> Result<Array2<f64>> {
        let v = &self.differences(b) + &u;
        let order: Vec<usize> = (0..self.weights.len()).collect();
        self.group_shrink(&v, gamma, &order)
    }

    /// Per-edge group shrinkage, visiting edges in `order`. Each edge
    /// depends only on its own row of `v`.
    pub(crate) fn group_shrink(
        &self,
        v: &Array2<f64>,
        gamma: f64,
        order: &[usize],
    ) -> Result<Array2<f64>> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::invalid(format!("gamma must be >= 0, got {gamma}")));
        }
        let mut z = Array2::<f64>::zeros(v.raw_dim());
        let edges = self.weights.edges();
        for &e in order {
            let row = v.row(e);
            let norm = row.dot(&row).sqrt();
            let f = group_factor(norm, gamma * edges[e].w);
            if f != 0.0 {
                z.row_mut(e).assign(&row.mapv(|x| x * f));
            }
        }
        Ok(z)
    }

    /// `½Σ‖yᵢ − βᵢ‖² + λΣ w_ij‖βᵢ − βⱼ‖`
    pub fn objective(&self, b: ArrayView2<'_, f64>, lambda: f64) -> f64 {
        let fit = (&self.y - &b).iter().map(|v| v * v).sum::<f64>() / 2.0;
        let pen: f64 = self
            .weights
            .edges()
            .iter()
            .map(|e| {
                let d = &b.row(e.i) - &b.row(e.j);
                e.w * d.dot(&d).sqrt()
            })
            .sum();
        fit + lambda * pen
    }
}

impl SplitProblem for ConvexClustering {
    type Beta = Array2<f64>;

    fn kind(&self) -> ProblemKind {
        ProblemKind::Cluster
    }

    fn split_shape(&self) -> (usize, usize) {
        (self.weights.len(), self.dim())
    }

    fn initial_beta(&self) -> Array2<f64> {
        Array2::zeros(self.y.raw_dim())
    }

    fn beta_step(&self, z: &Array2<f64>, u: &Array2<f64>) -> Result<Array2<f64>> {
        self.centroid_step(z.view(), u.view())
    }

    fn constraint(&self, beta: &Array2<f64>) -> Array2<f64> {
        self.differences(beta.view())
    }

    fn prox(&self, v: &Array2<f64>, gamma: f64) -> Result<Array2<f64>> {
        let order: Vec<usize> = (0..self.weights.len()).collect();
        self.group_shrink(v, gamma, &order)
    }

    /// Number of edges with a nonzero z.
    fn sparsity(&self, z: &Array2<f64>) -> usize {
        z.axis_iter(Axis(0))
            .filter(|r| r.iter().any(|&v| v != 0.0))
            .count()
    }

    fn active_set(&self, z: &Array2<f64>) -> ActiveSet {
        ActiveSet::Partition(extract_clusters(z.view(), &self.weights))
    }

    fn default_max_steps(&self) -> usize {
        DEFAULT_MAX_STEPS
    }
}

/// One-step clustering path plus per-point assignments.
#[derive(Debug, Clone)]
pub struct ClusterPath {
    pub path: Path,
    pub assignments: Vec<ClusterAssignment>,
    /// Number of components of the weight graph; the path cannot end with
    /// fewer clusters than this.
    pub weight_components: usize,
}

impl ClusterPath {
    fn from_path(path: Path, weights: &PairWeights) -> Self {
        let assignments = path
            .points
            .iter()
            .map(|p| match &p.active_set {
                ActiveSet::Partition(a) => a.clone(),
                _ => unreachable!("clustering points carry partitions"),
            })
            .collect();
        ClusterPath {
            path,
            assignments,
            weight_components: weights.components().cluster_count,
        }
    }

    pub fn is_disconnected(&self) -> bool {
        self.weight_components > 1
    }

    pub fn final_assignment(&self) -> Option<&ClusterAssignment> {
        self.assignments.last()
    }
}

/// One-step path with a multiplicative schedule.
pub fn clustering_algorithmic_path(
    problem: &ConvexClustering,
    schedule: &StepSchedule,
) -> Result<ClusterPath> {
    if schedule.kind != ScheduleKind::Geometric {
        return Err(Error::invalid(
            "clustering paths require a geometric schedule",
        ));
    }
    let path = algorithmic_path(problem, schedule)?;
    Ok(ClusterPath::from_path(path, problem.weights()))
}

/// Fully converged path over the geometric grid `γ₀ tᵏ`, stopping once all
/// z_ij are zero or `max_grid` levels have been visited.
pub fn clustering_warm_start_path(
    problem: &ConvexClustering,
    gamma0: f64,
    t: f64,
    max_grid: usize,
    tol: f64,
    max_inner: usize,
) -> Result<ClusterPath> {
    // first level is γ₀·t, matching the one-step path's first round
    let grid = geometric_grid(gamma0 * t, t, max_grid)?;
    let opts = WarmStartOptions {
        tol,
        max_inner,
        cold_start: false,
        stop_when_sparse: true,
    };
    let path = warm_start_path(problem, &grid, &opts)?;
    Ok(ClusterPath::from_path(path, problem.weights()))
}
