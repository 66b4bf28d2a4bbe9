//! Reduced-rank multi-task regression with a nuclear-norm penalty.
//!
//! The working loss is `1/(2n)‖Y − XB‖_F²`, so the β-step uses the same
//! `(XᵀX/n + I)` system as the lasso with a `p × q` right-hand side.

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use ndarray::{Array2, ArrayView2};

use crate::active_set::ActiveSet;
use crate::error::{Error, Result};
use crate::linalg::{all_finite, spectral_norm, CachedRidgeSolver};
use crate::path_engine::{Path, ProblemKind, SplitProblem, ZIterate};
use crate::prox::{singular_value_threshold, Threshold};

#[derive(Debug)]
pub struct ReducedRankProblem {
    x: Array2<f64>,
    y: Array2<f64>,
    solver: CachedRidgeSolver,
    /// `XᵀY / n`
    xty: Array2<f64>,
    lambda_max: f64,
    svd_count: AtomicUsize,
}

impl ReducedRankProblem {
    pub fn new(x: Array2<f64>, y: Array2<f64>) -> Result<Self> {
        if x.nrows() != y.nrows() {
            return Err(Error::dims(format!(
                "X has {} rows, Y has {}",
                x.nrows(),
                y.nrows()
            )));
        }
        if y.ncols() == 0 {
            return Err(Error::invalid("Y must have at least one column"));
        }
        if !all_finite(y.iter()) {
            return Err(Error::invalid("response contains non-finite entries"));
        }
        let solver = CachedRidgeSolver::new(x.view())?;
        let xty = x.t().dot(&y) / x.nrows() as f64;
        let lambda_max = spectral_norm(xty.view())?;
        Ok(ReducedRankProblem {
            x,
            y,
            solver,
            xty,
            lambda_max,
            svd_count: AtomicUsize::new(0),
        })
    }

    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    pub fn y(&self) -> ArrayView2<'_, f64> {
        self.y.view()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn q(&self) -> usize {
        self.y.ncols()
    }

    /// SVDs computed by z-steps since construction or the last reset.
    pub fn svd_count(&self) -> usize {
        self.svd_count.load(Ordering::Relaxed)
    }

    pub fn reset_svd_count(&self) {
        self.svd_count.store(0, Ordering::Relaxed);
    }

    /// `B = (XᵀX/n + I)⁻¹ (XᵀY/n + Z − U)`.
    pub fn beta_step(&self, z: ArrayView2<'_, f64>, u: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let shape = (self.p(), self.q());
        if z.dim() != shape || u.dim() != shape {
            return Err(Error::dims(format!(
                "Z and U must be {}x{}, got {:?} and {:?}",
                shape.0,
                shape.1,
                z.dim(),
                u.dim()
            )));
        }
        let rhs = &self.xty + &z - &u;
        self.solver.solve_mat(rhs.view())
    }

    /// `Z = SVT_γ(B + U)` and its rank.
    pub fn z_step(
        &self,
        b: ArrayView2<'_, f64>,
        u: ArrayView2<'_, f64>,
        gamma: f64,
    ) -> Result<(Array2<f64>, usize)> {
        self.svt(&(&b + &u), gamma)
    }

    fn svt(&self, v: &Array2<f64>, gamma: f64) -> Result<(Array2<f64>, usize)> {
        let tau = Threshold::new(gamma)?;
        self.svd_count.fetch_add(1, Ordering::Relaxed);
        singular_value_threshold(v.view(), tau)
    }
}

/// Rank of an arbitrary z. Path drivers take the rank from the SVT count
/// instead (see `z_iterate`); this is only used for z's that did not come
/// out of a z-step.
fn rank_of(z: &Array2<f64>) -> usize {
    if z.iter().all(|&v| v == 0.0) {
        return 0;
    }
    let dec = crate::linalg::svd(z.view()).expect("z iterates are finite");
    let tol = dec.singular_values[0] * 1e-12 * z.nrows().max(z.ncols()) as f64;
    dec.singular_values.iter().filter(|&&s| s > tol).count()
}

impl SplitProblem for ReducedRankProblem {
    type Beta = Array2<f64>;

    fn kind(&self) -> ProblemKind {
        ProblemKind::Rrr
    }

    fn split_shape(&self) -> (usize, usize) {
        (self.p(), self.q())
    }

    fn initial_beta(&self) -> Array2<f64> {
        Array2::zeros((self.p(), self.q()))
    }

    fn beta_step(&self, z: &Array2<f64>, u: &Array2<f64>) -> Result<Array2<f64>> {
        ReducedRankProblem::beta_step(self, z.view(), u.view())
    }

    fn constraint(&self, beta: &Array2<f64>) -> Array2<f64> {
        beta.clone()
    }

    fn prox(&self, v: &Array2<f64>, gamma: f64) -> Result<Array2<f64>> {
        Ok(self.svt(v, gamma)?.0)
    }

    fn sparsity(&self, z: &Array2<f64>) -> usize {
        rank_of(z)
    }

    fn active_set(&self, z: &Array2<f64>) -> ActiveSet {
        ActiveSet::Rank(rank_of(z))
    }

    fn z_iterate(&self, v: &Array2<f64>, gamma: f64) -> Result<ZIterate> {
        let (z, rank) = self.svt(v, gamma)?;
        Ok(ZIterate {
            z,
            sparsity: rank,
            active_set: ActiveSet::Rank(rank),
        })
    }

    fn lambda_max(&self) -> Option<f64> {
        Some(self.lambda_max)
    }

    fn default_max_steps(&self) -> usize {
        10 * self.p().min(self.q())
    }
}

/// `(γ, rank)` at every point where the rank changes, in path order.
pub fn rank_sequence(path: &Path) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for pt in &path.points {
        let r = pt.active_set.size();
        if out.last().map(|&(_, last)| last) != Some(r) {
            out.push((pt.gamma, r));
        }
    }
    out
}

/// Number of distinct ranks visited along a path.
pub fn distinct_ranks(path: &Path) -> usize {
    path.points
        .iter()
        .map(|p| p.active_set.size())
        .collect::<HashSet<_>>()
        .len()
}
