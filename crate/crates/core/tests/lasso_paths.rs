mod common;

use admm_paths::datagen::{gen_sparse_regression, SimSpec};
use admm_paths::lasso::{coordinate_descent_oracle, lasso_objective, LassoProblem};
use admm_paths::path_engine::{
    algorithmic_path, fixed_level_admm, make_lambda_grid, warm_start_path, GridSpacing,
    SplitProblem, StepSchedule, Termination, WarmStartOptions,
};
use common::*;
use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::Rng;

fn desk(seed: u64) -> LassoProblem {
    let d = gen_sparse_regression(&SimSpec::lasso(50, 100, 5, seed)).unwrap();
    LassoProblem::new(d.x, d.y).unwrap()
}

fn zcol(z: &Array2<f64>) -> Array1<f64> {
    z.column(0).to_owned()
}

#[test]
fn beta_step_matches_explicit_inverse() {
    for (n, p, seed) in [(30, 12, 1u64), (8, 40, 2), (25, 25, 3)] {
        let mut r = rng(seed);
        let x = gaussian(&mut r, n, p);
        let y = gaussian_vec(&mut r, n);
        let z = gaussian_vec(&mut r, p);
        let u = gaussian_vec(&mut r, p);
        let prob = LassoProblem::new(x.clone(), y.clone()).unwrap();
        let beta = prob.beta_step(z.view(), u.view()).unwrap();
        let rhs = x.t().dot(&y) / n as f64 + &z - &u;
        let expected = dense_solve_vec(&ridge_matrix(&x), &rhs);
        let scale = max_abs(expected.iter()).max(1.0);
        assert!(
            max_abs_diff(&beta, &expected) / scale < 1e-10,
            "n={n} p={p}"
        );
    }
}

#[test]
fn lambda_max_is_the_sparsity_boundary() {
    let prob = desk(11);
    let lm = prob.lambda_max().unwrap();
    let opts = WarmStartOptions {
        tol: 1e-9,
        ..Default::default()
    };
    let at = warm_start_path(&prob, &[lm], &opts).unwrap();
    assert!(at.points[0].z.iter().all(|&v| v == 0.0));
    assert_eq!(at.terminated, Termination::FullySparse);
    let below = warm_start_path(&prob, &[0.99 * lm], &opts).unwrap();
    assert!(below.points[0].sparsity > 0);
}

#[test]
fn zero_lambda_matches_normal_equations() {
    let mut r = rng(5);
    let (n, p) = (40, 10);
    let x = gaussian(&mut r, n, p);
    let y = gaussian_vec(&mut r, n);
    let prob = LassoProblem::new(x.clone(), y.clone()).unwrap();
    let path = warm_start_path(
        &prob,
        &[0.0],
        &WarmStartOptions {
            tol: 1e-11,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(path.points[0].converged);
    let ols = dense_solve_vec(&x.t().dot(&x), &x.t().dot(&y));
    assert!(max_abs_diff(&zcol(&path.points[0].z), &ols) < 1e-8);
}

#[test]
fn warm_starts_need_no_more_rounds_than_cold_starts() {
    let prob = desk(3);
    let grid = make_lambda_grid(prob.lambda_max().unwrap(), 20, GridSpacing::Log).unwrap();
    let warm = warm_start_path(&prob, &grid, &WarmStartOptions::default()).unwrap();
    let cold = warm_start_path(
        &prob,
        &grid,
        &WarmStartOptions {
            cold_start: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(warm.all_converged() && cold.all_converged());
    assert!(
        warm.total_rounds <= cold.total_rounds,
        "{} > {}",
        warm.total_rounds,
        cold.total_rounds
    );
}

#[test]
fn fully_iterated_one_step_round_equals_warm_start() {
    let prob = desk(4);
    let lm = prob.lambda_max().unwrap();
    for frac in [0.05, 0.3, 0.7] {
        let gamma = frac * lm;
        let fixed = fixed_level_admm(&prob, gamma, 1e-10, 1_000_000).unwrap();
        assert!(fixed.converged);
        let ws = warm_start_path(
            &prob,
            &[gamma],
            &WarmStartOptions {
                tol: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        let d = max_abs_diff(fixed.z.iter(), ws.points[0].z.iter());
        assert!(d < 1e-7, "gamma = {gamma}: {d}");
    }
}

#[test]
fn admm_support_settles_on_the_lasso_support() {
    let prob = desk(2);
    let lm = prob.lambda_max().unwrap();
    for frac in [0.1, 0.25, 0.5] {
        let lambda = frac * lm;
        let fixed = fixed_level_admm(&prob, lambda, 1e-10, 1_000_000).unwrap();
        let cd = coordinate_descent_oracle(prob.x(), prob.y(), lambda, 1e-12).unwrap();
        let cd_support = cd.iter().filter(|&&b| b != 0.0).count();
        let trace = &fixed.sparsity_trace;
        let tail = &trace[trace.len() * 3 / 4..];
        assert!(
            tail.iter().all(|&s| s == cd_support),
            "lambda = {lambda}: tail {:?} vs {cd_support}",
            &tail[..5]
        );
        // the support settles well before the iterates converge
        let settle = trace
            .iter()
            .rposition(|&s| s != cd_support)
            .map_or(0, |i| i + 1);
        assert!(settle < trace.len());
    }
}

#[test]
fn one_step_path_invariants_on_desk_instance() {
    let prob = desk(1);
    let lm = prob.lambda_max().unwrap();
    let sched = StepSchedule::additive(1e-4 * lm, lm / 500.0, 10_000).unwrap();
    let path = algorithmic_path(&prob, &sched).unwrap();
    assert_eq!(path.terminated, Termination::FullySparse);
    assert_eq!(path.total_rounds, path.points.len());
    for (i, pt) in path.points.iter().enumerate() {
        assert_eq!(pt.k, i + 1);
        assert_eq!(pt.rounds, i + 1);
    }
    assert!(path.points.windows(2).all(|w| w[1].gamma > w[0].gamma));
    let last = path.last().unwrap();
    assert_eq!(last.sparsity, 0);
    assert!(last.z.iter().all(|&v| v == 0.0));
    assert!(path.points[0].sparsity > 50, "path starts dense");
}

#[test]
fn step_cap_is_honoured() {
    let prob = desk(1);
    let path = algorithmic_path(&prob, &StepSchedule::additive(1e-6, 1e-6, 3).unwrap()).unwrap();
    assert_eq!(path.terminated, Termination::MaxSteps);
    assert_eq!(path.points.len(), 3);
}

#[test]
fn coordinate_descent_beats_perturbations() {
    let mut r = rng(21);
    let x = gaussian(&mut r, 20, 10);
    let y = gaussian_vec(&mut r, 20);
    let lm = admm_paths::lasso::lambda_max(x.view(), y.view()).unwrap();
    let lambda = 0.2 * lm;
    let b = coordinate_descent_oracle(x.view(), y.view(), lambda, 1e-13).unwrap();
    let best = lasso_objective(x.view(), y.view(), b.view(), lambda);
    for i in 0..1000 {
        let scale = 10f64.powf(-4.0 + 3.0 * (i as f64) / 1000.0);
        let pert = Array1::from_shape_fn(10, |_| r.random_range(-1.0..1.0) * scale);
        let cand = &b + &pert;
        assert!(best <= lasso_objective(x.view(), y.view(), cand.view(), lambda) + 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn one_step_paths_end_fully_sparse(n in 3usize..12, p in 2usize..15, seed in 0u64..1000) {
        let mut r = rng(seed);
        let x = gaussian(&mut r, n, p);
        let y = gaussian_vec(&mut r, n);
        let prob = LassoProblem::new(x, y).unwrap();
        let lm = prob.lambda_max().unwrap();
        let sched = StepSchedule::additive(1e-4 * lm, lm / 100.0, 100_000).unwrap();
        let path = algorithmic_path(&prob, &sched).unwrap();
        prop_assert_eq!(path.terminated, Termination::FullySparse);
        prop_assert_eq!(path.total_rounds, path.points.len());
        prop_assert!(path.points.windows(2).all(|w| w[1].gamma > w[0].gamma && w[1].rounds >= w[0].rounds));
        prop_assert_eq!(path.last().unwrap().sparsity, 0);
    }

    #[test]
    fn above_lambda_max_everything_is_zero(n in 2usize..10, p in 1usize..10, seed in 0u64..1000, f in 1.0f64..3.0) {
        let mut r = rng(seed);
        let x = gaussian(&mut r, n, p);
        let y = gaussian_vec(&mut r, n);
        let lm = admm_paths::lasso::lambda_max(x.view(), y.view()).unwrap();
        let b = coordinate_descent_oracle(x.view(), y.view(), f * lm, 1e-12).unwrap();
        prop_assert!(b.iter().all(|&v| v == 0.0));
    }
}
