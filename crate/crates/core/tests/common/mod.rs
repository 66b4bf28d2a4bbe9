#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| StandardNormal.sample(rng))
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize) -> Array1<f64> {
    Array1::from_shape_fn(len, |_| StandardNormal.sample(rng))
}

/// Gauss-Jordan elimination with partial pivoting; solves `A X = B`.
pub fn dense_solve(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.nrows(), n);
    let m = b.ncols();
    let mut aug = Array2::<f64>::zeros((n, n + m));
    aug.slice_mut(ndarray::s![.., ..n]).assign(a);
    aug.slice_mut(ndarray::s![.., n..]).assign(b);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                aug[[i, col]]
                    .abs()
                    .partial_cmp(&aug[[j, col]].abs())
                    .unwrap()
            })
            .unwrap();
        if piv != col {
            for k in 0..n + m {
                aug.swap([col, k], [piv, k]);
            }
        }
        let d = aug[[col, col]];
        assert!(d.abs() > 1e-300, "singular system");
        for k in 0..n + m {
            aug[[col, k]] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = aug[[i, col]];
                if f != 0.0 {
                    for k in 0..n + m {
                        aug[[i, k]] -= f * aug[[col, k]];
                    }
                }
            }
        }
    }
    aug.slice(ndarray::s![.., n..]).to_owned()
}

pub fn dense_solve_vec(a: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let x = dense_solve(a, &b.clone().insert_axis(ndarray::Axis(1)));
    x.column(0).to_owned()
}

/// `XᵀX/n + I`
pub fn ridge_matrix(x: &Array2<f64>) -> Array2<f64> {
    x.t().dot(x) / x.nrows() as f64 + Array2::<f64>::eye(x.ncols())
}

pub fn max_abs_diff<'a>(
    a: impl IntoIterator<Item = &'a f64>,
    b: impl IntoIterator<Item = &'a f64>,
) -> f64 {
    a.into_iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs<'a>(a: impl IntoIterator<Item = &'a f64>) -> f64 {
    a.into_iter().map(|x| x.abs()).fold(0.0, f64::max)
}
