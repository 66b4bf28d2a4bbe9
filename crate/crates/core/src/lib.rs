//! ADMM solvers and one-step algorithmic regularization paths.
//!
//! The crate traces sequences of sparse models for three problems that
//! share one operator-splitting contract ([`path_engine::SplitProblem`]):
//!
//! * [`lasso`]: ℓ₁-penalized least squares,
//! * [`multitask`]: nuclear-norm reduced-rank regression,
//! * [`cvxcluster`]: convex clustering with group fusion penalties.
//!
//! Two drivers are available for each: a fully converged warm-start path
//! over a λ grid, and the one-step path that performs a single ADMM round
//! per regularization level and records the sparsity of the z iterates.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::op_ref)]

pub mod active_set;
pub mod cli;
pub mod cvxcluster;
pub mod datagen;
pub mod error;
pub mod io;
pub mod lasso;
pub mod linalg;
pub mod multitask;
pub mod path_engine;
pub mod prox;

pub use active_set::{ActiveSet, ClusterAssignment};
pub use error::{Error, Result};
pub use path_engine::{
    algorithmic_path, make_lambda_grid, warm_start_path, GridSpacing, Path, PathPoint, ProblemKind,
    ScheduleKind, SplitProblem, StepSchedule, Termination, WarmStartOptions,
};
