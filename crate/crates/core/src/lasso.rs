//! Sparse linear regression, `1/(2n)‖y − Xβ‖² + λ‖β‖₁`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::active_set::ActiveSet;
use crate::error::{Error, Result};
use crate::linalg::{all_finite, CachedRidgeSolver};
use crate::path_engine::{Path, ProblemKind, SplitProblem};
use crate::prox::{soft_scalar, soft_threshold, Threshold};

/// `(1/n)‖Xᵀy‖_∞`, the smallest λ whose solution is all zero.
pub fn lambda_max(x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>) -> Result<f64> {
    let (n, p) = x.dim();
    if n == 0 || p == 0 || y.is_empty() {
        return Err(Error::invalid("lambda_max needs non-empty X and y"));
    }
    if y.len() != n {
        return Err(Error::dims(format!("y has {} rows, X has {n}", y.len())));
    }
    Ok(x.t().dot(&y).iter().fold(0.0f64, |m, v| m.max(v.abs())) / n as f64)
}

/// Lasso data with a cached ridge factorization.
#[derive(Debug, Clone)]
pub struct LassoProblem {
    x: Array2<f64>,
    y: Array1<f64>,
    solver: CachedRidgeSolver,
    /// `Xᵀy / n`
    xty: Array1<f64>,
    lambda_max: f64,
}

impl LassoProblem {
    pub fn new(x: Array2<f64>, y: Array1<f64>) -> Result<Self> {
        if !all_finite(y.iter()) {
            return Err(Error::invalid("response contains non-finite entries"));
        }
        let lambda_max = lambda_max(x.view(), y.view())?;
        let solver = CachedRidgeSolver::new(x.view())?;
        let xty = x.t().dot(&y) / x.nrows() as f64;
        Ok(LassoProblem {
            x,
            y,
            solver,
            xty,
            lambda_max,
        })
    }

    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    pub fn y(&self) -> ArrayView1<'_, f64> {
        self.y.view()
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn solver(&self) -> &CachedRidgeSolver {
        &self.solver
    }

    /// `β = (XᵀX/n + I)⁻¹ (Xᵀy/n + z − u)`.
    pub fn beta_step(&self, z: ArrayView1<'_, f64>, u: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        if z.len() != self.p() || u.len() != self.p() {
            return Err(Error::dims(format!(
                "z and u must have length p = {}, got {} and {}",
                self.p(),
                z.len(),
                u.len()
            )));
        }
        let rhs = &self.xty + &z - &u;
        self.solver.solve_vec(rhs.view())
    }

    /// `z = S_γ(β + u)`.
    pub fn z_step(
        &self,
        beta: ArrayView1<'_, f64>,
        u: ArrayView1<'_, f64>,
        gamma: f64,
    ) -> Result<Array1<f64>> {
        Ok(soft_threshold(&(&beta + &u), Threshold::new(gamma)?))
    }

    /// `1/(2n)‖y − Xβ‖² + λ‖β‖₁`
    pub fn objective(&self, beta: ArrayView1<'_, f64>, lambda: f64) -> f64 {
        lasso_objective(self.x.view(), self.y.view(), beta, lambda)
    }
}

pub fn lasso_objective(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    beta: ArrayView1<'_, f64>,
    lambda: f64,
) -> f64 {
    let r = &y - &x.dot(&beta);
    r.dot(&r) / (2.0 * x.nrows() as f64) + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
}

fn column(z: &Array2<f64>) -> ArrayView1<'_, f64> {
    z.index_axis(Axis(1), 0)
}

impl SplitProblem for LassoProblem {
    type Beta = Array1<f64>;

    fn kind(&self) -> ProblemKind {
        ProblemKind::Lasso
    }

    fn split_shape(&self) -> (usize, usize) {
        (self.p(), 1)
    }

    fn initial_beta(&self) -> Array1<f64> {
        Array1::zeros(self.p())
    }

    fn beta_step(&self, z: &Array2<f64>, u: &Array2<f64>) -> Result<Array1<f64>> {
        LassoProblem::beta_step(self, column(z), column(u))
    }

    fn constraint(&self, beta: &Array1<f64>) -> Array2<f64> {
        beta.clone().insert_axis(Axis(1))
    }

    fn prox(&self, v: &Array2<f64>, gamma: f64) -> Result<Array2<f64>> {
        Ok(soft_threshold(v, Threshold::new(gamma)?))
    }

    fn sparsity(&self, z: &Array2<f64>) -> usize {
        z.iter().filter(|&&v| v != 0.0).count()
    }

    fn active_set(&self, z: &Array2<f64>) -> ActiveSet {
        ActiveSet::Support(
            z.iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(j, _)| j)
                .collect(),
        )
    }

    fn lambda_max(&self) -> Option<f64> {
        Some(self.lambda_max)
    }

    fn default_max_steps(&self) -> usize {
        10 * self.p()
    }
}

const CD_MAX_SWEEPS: usize = 1_000_000;

/// Cyclic coordinate descent for the lasso, run until the largest
/// coordinate change in a sweep is at most `tol`.
///
/// Residual-based ("naive") updates; no Gram matrix is formed.
pub fn coordinate_descent_oracle(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    lambda: f64,
    tol: f64,
) -> Result<Array1<f64>> {
    let (n, p) = x.dim();
    if n == 0 || p == 0 {
        return Err(Error::invalid("coordinate descent needs non-empty X"));
    }
    if y.len() != n {
        return Err(Error::dims(format!("y has {} rows, X has {n}", y.len())));
    }
    if !(lambda >= 0.0) || !(tol > 0.0) {
        return Err(Error::invalid("lambda must be >= 0 and tol > 0"));
    }
    let nf = n as f64;
    let col_sq: Vec<f64> = x.axis_iter(Axis(1)).map(|c| c.dot(&c) / nf).collect();
    let mut beta = Array1::<f64>::zeros(p);
    let mut resid = y.to_owned();

    for _ in 0..CD_MAX_SWEEPS {
        let mut max_delta = 0.0f64;
        for j in 0..p {
            if col_sq[j] == 0.0 {
                continue;
            }
            let xj = x.column(j);
            let old = beta[j];
            let rho = xj.dot(&resid) / nf + col_sq[j] * old;
            let new = soft_scalar(rho, lambda) / col_sq[j];
            let delta = new - old;
            if delta != 0.0 {
                resid.scaled_add(-delta, &xj);
                beta[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta <= tol {
            break;
        }
    }
    Ok(beta)
}

/// Number of true variables that enter the path before the first false
/// positive, reading the path from the sparse end.
///
/// A variable enters at the largest γ where it is active. Variables entering
/// at the same point as the first false positive are not counted.
pub fn true_before_first_false(path: &Path, truth: ArrayView1<'_, f64>) -> usize {
    let mut entry: Vec<Option<f64>> = vec![None; truth.len()];
    for pt in &path.points {
        if let ActiveSet::Support(idx) = &pt.active_set {
            for &j in idx {
                if let Some(e) = entry.get_mut(j) {
                    *e = Some(e.map_or(pt.gamma, |g: f64| g.max(pt.gamma)));
                }
            }
        }
    }
    let mut order: Vec<(f64, bool)> = entry
        .iter()
        .zip(truth.iter())
        .filter_map(|(e, &b)| e.map(|g| (g, b != 0.0)))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let first_false = order.iter().find(|e| !e.1).map(|e| e.0);
    order
        .iter()
        .filter(|e| e.1 && first_false.is_none_or(|f| e.0 > f))
        .count()
}
