//! Generic path drivers over a split problem.
//!
//! Every problem is written as `min L(β) + γ P(z)` subject to `Aβ = z`,
//! with the penalty parameter ρ fixed at 1. A problem supplies the β-step,
//! the constraint map `A` and the proximal z-step; the engine owns the
//! scaled dual update `u ← u + Aβ − z`, which is identical for every problem.
//!
//! Two drivers are provided:
//!
//! * [`algorithmic_path`]: one (β, z, u) round per regularization level
//!   along an increasing schedule, stopping once z is fully sparse.
//! * [`warm_start_path`]: iterates (z, β, u) to convergence at each value of
//!   a λ grid, carrying β, z and u from one λ to the next.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::active_set::{distinct_count, ActiveSet};
use crate::error::{Error, Result};
use crate::linalg::{all_finite, frobenius_norm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Lasso,
    Rrr,
    Cluster,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Lasso => "lasso",
            ProblemKind::Rrr => "rrr",
            ProblemKind::Cluster => "cluster",
        }
    }
}

/// Contract shared by every problem instance.
///
/// `z` and `u` live in the range of the constraint map and are stored as
/// matrices of shape [`split_shape`](SplitProblem::split_shape).
pub trait SplitProblem {
    type Beta: Clone;

    fn kind(&self) -> ProblemKind;

    fn split_shape(&self) -> (usize, usize);

    fn initial_beta(&self) -> Self::Beta;

    /// argmin over β of `L(β) + ½‖Aβ − z + u‖²`.
    fn beta_step(&self, z: &Array2<f64>, u: &Array2<f64>) -> Result<Self::Beta>;

    /// The constraint map `Aβ`.
    fn constraint(&self, beta: &Self::Beta) -> Array2<f64>;

    /// Proximal operator of `γP` evaluated at `v = Aβ + u`.
    fn prox(&self, v: &Array2<f64>, gamma: f64) -> Result<Array2<f64>>;

    /// Zero exactly when z is fully sparse for this problem.
    fn sparsity(&self, z: &Array2<f64>) -> usize;

    fn active_set(&self, z: &Array2<f64>) -> ActiveSet;

    /// z-step together with its sparsity measure and active set. Problems
    /// whose prox already yields the model size (e.g. the SVT rank) override
    /// this to avoid recomputing it.
    fn z_iterate(&self, v: &Array2<f64>, gamma: f64) -> Result<ZIterate> {
        let z = self.prox(v, gamma)?;
        Ok(ZIterate {
            sparsity: self.sparsity(&z),
            active_set: self.active_set(&z),
            z,
        })
    }

    /// Scale of the smallest fully-sparsifying λ, when it is cheap to compute.
    fn lambda_max(&self) -> Option<f64> {
        None
    }

    /// Step-count safeguard used when a schedule does not override it.
    fn default_max_steps(&self) -> usize;
}

#[derive(Debug, Clone)]
pub struct ZIterate {
    pub z: Array2<f64>,
    pub sparsity: usize,
    pub active_set: ActiveSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    /// `γᵏ = γᵏ⁻¹ + t`
    Additive,
    /// `γᵏ = γᵏ⁻¹ · t`
    Geometric,
}

/// Increasing sequence of regularization levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    pub kind: ScheduleKind,
    pub gamma0: f64,
    pub t: f64,
    pub max_steps: usize,
}

impl StepSchedule {
    pub fn new(kind: ScheduleKind, gamma0: f64, t: f64, max_steps: usize) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(Error::invalid(format!(
                "gamma0 must be positive, got {gamma0}"
            )));
        }
        let t_ok = match kind {
            ScheduleKind::Additive => t.is_finite() && t > 0.0,
            ScheduleKind::Geometric => t.is_finite() && t > 1.0,
        };
        if !t_ok {
            return Err(Error::invalid(format!(
                "step parameter t = {t} is invalid for a {kind:?} schedule"
            )));
        }
        if max_steps == 0 {
            return Err(Error::invalid("max_steps must be positive"));
        }
        Ok(StepSchedule {
            kind,
            gamma0,
            t,
            max_steps,
        })
    }

    pub fn additive(gamma0: f64, t: f64, max_steps: usize) -> Result<Self> {
        Self::new(ScheduleKind::Additive, gamma0, t, max_steps)
    }

    pub fn geometric(gamma0: f64, t: f64, max_steps: usize) -> Result<Self> {
        Self::new(ScheduleKind::Geometric, gamma0, t, max_steps)
    }

    /// Step cap for a schedule when none is given: the problem's own default,
    /// raised when needed so that γ can reach twice `lambda_max`.
    pub fn default_max_steps<P: SplitProblem + ?Sized>(
        problem: &P,
        kind: ScheduleKind,
        gamma0: f64,
        t: f64,
    ) -> usize {
        let base = problem.default_max_steps();
        let Some(lm) = problem.lambda_max() else {
            return base;
        };
        let target = 2.0 * lm;
        if !(target > gamma0) {
            return base;
        }
        let needed = match kind {
            ScheduleKind::Additive if t > 0.0 => ((target - gamma0) / t).ceil(),
            ScheduleKind::Geometric if t > 1.0 => ((target / gamma0).ln() / t.ln()).ceil(),
            _ => return base,
        };
        if needed.is_finite() && needed < 1e9 {
            base.max(needed as usize)
        } else {
            base
        }
    }

    pub fn advance(&self, gamma: f64) -> f64 {
        match self.kind {
            ScheduleKind::Additive => gamma + self.t,
            ScheduleKind::Geometric => gamma * self.t,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PathPoint {
    pub k: usize,
    pub gamma: f64,
    #[serde(skip)]
    pub z: Array2<f64>,
    pub active_set: ActiveSet,
    pub sparsity: usize,
    /// Cumulative ADMM rounds up to and including this point.
    pub rounds: usize,
    /// Always true for one-step points; false when a warm-start level hit `max_inner`.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FullySparse,
    MaxSteps,
    /// Warm-start grid exhausted with a nonzero final z.
    GridComplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Driver {
    Arp,
    Warmstart,
}

#[derive(Debug, Clone)]
pub struct Path {
    pub problem: ProblemKind,
    pub driver: Driver,
    pub points: Vec<PathPoint>,
    pub terminated: Termination,
    pub total_rounds: usize,
}

impl Path {
    pub fn last(&self) -> Option<&PathPoint> {
        self.points.last()
    }

    pub fn distinct_active_sets(&self) -> usize {
        distinct_count(self.points.iter().map(|p| &p.active_set))
    }

    pub fn all_converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }
}

fn check_finite(m: &Array2<f64>, step: usize, gamma: f64, what: &str) -> Result<()> {
    if all_finite(m.iter()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            step,
            gamma,
            detail: format!("{what} is not finite"),
        })
    }
}

fn with_step<T>(r: Result<T>, step: usize, gamma: f64) -> Result<T> {
    r.map_err(|e| match e {
        Error::NonFinite { .. } => e,
        other => Error::NonFinite {
            step,
            gamma,
            detail: other.to_string(),
        },
    })
}

/// One-step path: `γ` increases every round, and each round performs exactly
/// one β-step, one z-step and one dual step, in that order.
pub fn algorithmic_path<P: SplitProblem + ?Sized>(
    problem: &P,
    schedule: &StepSchedule,
) -> Result<Path> {
    let shape = problem.split_shape();
    let mut z = Array2::<f64>::zeros(shape);
    let mut u = Array2::<f64>::zeros(shape);
    let mut gamma = schedule.gamma0;
    let mut points = Vec::new();
    let mut terminated = Termination::MaxSteps;

    for k in 1..=schedule.max_steps {
        gamma = schedule.advance(gamma);
        let beta = with_step(problem.beta_step(&z, &u), k, gamma)?;
        let a_beta = problem.constraint(&beta);
        check_finite(&a_beta, k, gamma, "beta-step")?;
        let it = with_step(problem.z_iterate(&(&a_beta + &u), gamma), k, gamma)?;
        z = it.z;
        u = u + &a_beta - &z;
        check_finite(&u, k, gamma, "dual variable")?;

        let sparsity = it.sparsity;
        points.push(PathPoint {
            k,
            gamma,
            z: z.clone(),
            active_set: it.active_set,
            sparsity,
            rounds: k,
            converged: true,
        });
        if sparsity == 0 {
            terminated = Termination::FullySparse;
            break;
        }
    }

    Ok(Path {
        problem: problem.kind(),
        driver: Driver::Arp,
        total_rounds: points.len(),
        points,
        terminated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarmStartOptions {
    /// Absolute tolerance on both the primal residual `‖Aβ − z‖` and the
    /// change `‖z − z_prev‖`.
    pub tol: f64,
    pub max_inner: usize,
    /// Reset β, z and u before every λ (cold starts), for comparison.
    pub cold_start: bool,
    /// Stop walking the grid once a converged z is fully sparse.
    pub stop_when_sparse: bool,
}

impl Default for WarmStartOptions {
    fn default() -> Self {
        WarmStartOptions {
            tol: 1e-6,
            max_inner: 100_000,
            cold_start: false,
            stop_when_sparse: false,
        }
    }
}

/// Fully converged ADMM along an increasing λ grid with warm starts.
///
/// Each inner iteration runs the z-step first, then the β-step and the dual
/// step. A level that exhausts `max_inner` is recorded with
/// `converged = false` and the walk continues.
pub fn warm_start_path<P: SplitProblem + ?Sized>(
    problem: &P,
    lambdas: &[f64],
    opts: &WarmStartOptions,
) -> Result<Path> {
    if lambdas.is_empty() {
        return Err(Error::invalid("lambda grid is empty"));
    }
    if lambdas[0] < 0.0 || lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::invalid(
            "lambda grid must be finite and non-negative",
        ));
    }
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("lambda grid must be strictly increasing"));
    }
    if !(opts.tol > 0.0) || opts.max_inner == 0 {
        return Err(Error::invalid("tol and max_inner must be positive"));
    }

    let shape = problem.split_shape();
    let mut a_beta = problem.constraint(&problem.initial_beta());
    let mut z = Array2::<f64>::zeros(shape);
    let mut u = Array2::<f64>::zeros(shape);
    let mut rounds = 0usize;
    let mut points = Vec::with_capacity(lambdas.len());

    for (j, &lambda) in lambdas.iter().enumerate() {
        if opts.cold_start && j > 0 {
            a_beta = problem.constraint(&problem.initial_beta());
            z.fill(0.0);
            u.fill(0.0);
        }
        let mut converged = false;
        let mut last: Option<ZIterate> = None;
        for _ in 0..opts.max_inner {
            let step = rounds + 1;
            let it = with_step(problem.z_iterate(&(&a_beta + &u), lambda), step, lambda)?;
            let z_new = it.z.clone();
            let beta = with_step(problem.beta_step(&z_new, &u), step, lambda)?;
            a_beta = problem.constraint(&beta);
            check_finite(&a_beta, step, lambda, "beta-step")?;
            let primal = &a_beta - &z_new;
            u += &primal;
            let r = frobenius_norm(primal.view());
            let s = frobenius_norm((&z_new - &z).view());
            z = z_new;
            rounds += 1;
            last = Some(it);
            if r <= opts.tol && s <= opts.tol {
                converged = true;
                break;
            }
        }
        let it = last.expect("max_inner >= 1");
        let sparsity = it.sparsity;
        points.push(PathPoint {
            k: j + 1,
            gamma: lambda,
            z: z.clone(),
            active_set: it.active_set,
            sparsity,
            rounds,
            converged,
        });
        if opts.stop_when_sparse && sparsity == 0 && converged {
            break;
        }
    }

    let terminated = if points.last().map(|p| p.sparsity) == Some(0) {
        Termination::FullySparse
    } else {
        Termination::GridComplete
    };
    Ok(Path {
        problem: problem.kind(),
        driver: Driver::Warmstart,
        points,
        terminated,
        total_rounds: rounds,
    })
}

/// Result of iterating the one-step round to convergence at a fixed level.
#[derive(Debug, Clone)]
pub struct FixedLevelSolution<B> {
    pub beta: B,
    pub z: Array2<f64>,
    pub u: Array2<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `sparsity(z)` after every iteration.
    pub sparsity_trace: Vec<usize>,
}

/// Plain ADMM at a fixed level `gamma`, using the (β, z, u) order of the
/// one-step path and starting from z = u = 0.
pub fn fixed_level_admm<P: SplitProblem + ?Sized>(
    problem: &P,
    gamma: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FixedLevelSolution<P::Beta>> {
    let shape = problem.split_shape();
    let mut z = Array2::<f64>::zeros(shape);
    let mut u = Array2::<f64>::zeros(shape);
    let mut beta = problem.initial_beta();
    let mut trace = Vec::new();
    let mut converged = false;
    for it in 1..=max_iter {
        beta = with_step(problem.beta_step(&z, &u), it, gamma)?;
        let a_beta = problem.constraint(&beta);
        check_finite(&a_beta, it, gamma, "beta-step")?;
        let zi = with_step(problem.z_iterate(&(&a_beta + &u), gamma), it, gamma)?;
        let z_new = zi.z;
        let primal = &a_beta - &z_new;
        u += &primal;
        let r = frobenius_norm(primal.view());
        let s = frobenius_norm((&z_new - &z).view());
        z = z_new;
        trace.push(zi.sparsity);
        if r <= tol && s <= tol {
            converged = true;
            break;
        }
    }
    Ok(FixedLevelSolution {
        beta,
        iterations: trace.len(),
        z,
        u,
        converged,
        sparsity_trace: trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridSpacing {
    Log,
    Linear,
}

/// Increasing grid of `m` values ending at `lambda_max` and starting at 0.
///
/// `Log` spacing places `m − 1` log-spaced values between
/// `lambda_max · 1e-3` and `lambda_max`, after a leading 0.
pub fn make_lambda_grid(lambda_max: f64, m: usize, spacing: GridSpacing) -> Result<Vec<f64>> {
    if !(lambda_max.is_finite() && lambda_max > 0.0) {
        return Err(Error::invalid(format!(
            "lambda_max must be positive, got {lambda_max}"
        )));
    }
    if m < 2 {
        return Err(Error::invalid(format!(
            "grid needs at least 2 values, got {m}"
        )));
    }
    let grid = match spacing {
        GridSpacing::Linear => (0..m)
            .map(|i| {
                if i == m - 1 {
                    lambda_max
                } else {
                    lambda_max * i as f64 / (m - 1) as f64
                }
            })
            .collect(),
        GridSpacing::Log => {
            let positive = m - 1;
            let lo = (lambda_max * 1e-3).ln();
            let hi = lambda_max.ln();
            let mut g = Vec::with_capacity(m);
            g.push(0.0);
            if positive == 1 {
                g.push(lambda_max);
            } else {
                for i in 0..positive {
                    if i == positive - 1 {
                        g.push(lambda_max);
                    } else {
                        let f = i as f64 / (positive - 1) as f64;
                        g.push((lo + f * (hi - lo)).exp());
                    }
                }
            }
            g
        }
    };
    Ok(grid)
}

/// `len` values `start · tⁱ`, i = 0..len.
pub fn geometric_grid(start: f64, t: f64, len: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && start.is_finite()) || !(t > 1.0 && t.is_finite()) {
        return Err(Error::invalid("geometric grid needs start > 0 and t > 1"));
    }
    let mut g = Vec::with_capacity(len);
    let mut v = start;
    for _ in 0..len {
        g.push(v);
        v *= t;
    }
    Ok(g)
}
