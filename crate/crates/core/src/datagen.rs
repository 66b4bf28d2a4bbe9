//! Seeded synthetic data for the three problem families.

use std::f64::consts::PI;

use ndarray::{Array1, Array2, Axis};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path_engine::ProblemKind;

/// Everything a generator needs; the seed fully determines the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub kind: ProblemKind,
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    /// Responses (reduced-rank only).
    pub q: usize,
    /// Nonzero coefficients (lasso) or target rank (reduced-rank).
    pub s: usize,
    /// Range of |β*ⱼ| for the lasso. The reduced-rank generator uses the
    /// upper end as the per-response signal standard deviation,
    /// `‖B*‖_F / √q`.
    pub magnitude: (f64, f64),
    /// Noise standard deviation (halfmoon jitter for clustering).
    pub noise: f64,
    /// Equicorrelation between design columns (lasso only).
    pub correlation: f64,
}

impl SimSpec {
    pub fn lasso(n: usize, p: usize, s: usize, seed: u64) -> Self {
        SimSpec {
            kind: ProblemKind::Lasso,
            seed,
            n,
            p,
            q: 1,
            s,
            magnitude: (5.0, 10.0),
            noise: 1.0,
            correlation: 0.0,
        }
    }

    pub fn low_rank(n: usize, p: usize, q: usize, rank: usize, seed: u64) -> Self {
        SimSpec {
            kind: ProblemKind::Rrr,
            seed,
            n,
            p,
            q,
            s: rank,
            magnitude: (1.0, 1.0),
            noise: 1.0,
            correlation: 0.0,
        }
    }

    pub fn halfmoons(n: usize, seed: u64) -> Self {
        SimSpec {
            kind: ProblemKind::Cluster,
            seed,
            n,
            p: 2,
            q: 1,
            s: 0,
            magnitude: (1.0, 1.0),
            noise: 0.1,
            correlation: 0.0,
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Centers each column and scales it to `‖x_j‖²/n = 1`. Constant columns
/// are left centered.
pub fn standardize_columns(x: &mut Array2<f64>) {
    let n = x.nrows() as f64;
    for mut col in x.axis_iter_mut(Axis(1)) {
        let mean = col.sum() / n;
        col.mapv_inplace(|v| v - mean);
        let sd = (col.dot(&col) / n).sqrt();
        if sd > 0.0 {
            col.mapv_inplace(|v| v / sd);
        }
    }
}

#[derive(Debug, Clone)]
pub struct SparseRegressionData {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub beta_star: Array1<f64>,
}

/// `y = Xβ* + σε` with standardized equicorrelated Gaussian columns.
pub fn gen_sparse_regression(spec: &SimSpec) -> Result<SparseRegressionData> {
    let SimSpec { n, p, s, .. } = *spec;
    if n == 0 || p == 0 {
        return Err(Error::invalid(format!(
            "n and p must be positive, got n = {n}, p = {p}"
        )));
    }
    if s > p {
        return Err(Error::invalid(format!("sparsity s = {s} exceeds p = {p}")));
    }
    if !(0.0..1.0).contains(&spec.correlation) {
        return Err(Error::invalid("correlation must lie in [0, 1)"));
    }
    let (lo, hi) = spec.magnitude;
    if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::invalid("magnitude range must satisfy 0 <= lo <= hi"));
    }
    if !(spec.noise >= 0.0) {
        return Err(Error::invalid("noise must be non-negative"));
    }

    let mut rng = spec.rng();
    let rho = spec.correlation;
    let shared: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
    let mut x = Array2::from_shape_fn((n, p), |_| 0.0);
    for i in 0..n {
        for j in 0..p {
            x[[i, j]] = (1.0 - rho).sqrt() * normal(&mut rng) + rho.sqrt() * shared[i];
        }
    }
    if n > 1 {
        standardize_columns(&mut x);
    }

    let mut beta = Array1::<f64>::zeros(p);
    let mut support = sample(&mut rng, p, s).into_vec();
    support.sort_unstable();
    for j in support {
        let mag = if hi > lo {
            rng.random_range(lo..hi)
        } else {
            lo
        };
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        beta[j] = sign * mag;
    }
    let mut y = x.dot(&beta);
    if spec.noise > 0.0 {
        for v in y.iter_mut() {
            *v += spec.noise * normal(&mut rng);
        }
    }
    Ok(SparseRegressionData {
        x,
        y,
        beta_star: beta,
    })
}

#[derive(Debug, Clone)]
pub struct LowRankData {
    pub x: Array2<f64>,
    pub y: Array2<f64>,
    pub b_star: Array2<f64>,
}

/// Random ±1 pattern made of `blocks` contiguous runs of equal sign.
fn block_pattern(rng: &mut ChaCha8Rng, len: usize, blocks: usize) -> Array1<f64> {
    let blocks = blocks.clamp(1, len);
    let signs: Vec<f64> = (0..blocks)
        .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    Array1::from_shape_fn(len, |i| signs[i * blocks / len])
}

fn numerical_rank(a: &Array2<f64>) -> usize {
    crate::linalg::svd(a.view())
        .map(|d| d.singular_values.iter().filter(|&&s| s > 1e-8).count())
        .unwrap_or(0)
}

/// `Y = XB* + σE` where B* is a sum of `rank` outer products of ±1 block
/// patterns with decreasing weights, and X, E are standard Gaussian.
/// B* is rescaled so that `‖B*‖_F / √q` equals the magnitude scale.
pub fn gen_low_rank_coeff(spec: &SimSpec) -> Result<LowRankData> {
    let SimSpec {
        n, p, q, s: rank, ..
    } = *spec;
    if n == 0 || p == 0 || q == 0 {
        return Err(Error::invalid("n, p and q must be positive"));
    }
    if rank > p.min(q) {
        return Err(Error::invalid(format!(
            "rank {rank} exceeds min(p, q) = {}",
            p.min(q)
        )));
    }
    if !(spec.noise >= 0.0) {
        return Err(Error::invalid("noise must be non-negative"));
    }
    let scale = spec.magnitude.1;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid("signal scale must be positive and finite"));
    }
    let mut rng = spec.rng();

    let mut b = Array2::<f64>::zeros((p, q));
    if rank > 0 {
        let blocks_p = p.min(2 * rank);
        let blocks_q = q.min(2 * rank);
        // patterns are redrawn until the factors are independent; the loop
        // consumes the same seeded stream so the result stays deterministic
        loop {
            b.fill(0.0);
            for r in 0..rank {
                let left = block_pattern(&mut rng, p, blocks_p);
                let right = block_pattern(&mut rng, q, blocks_q);
                let a = (rank - r) as f64 / rank as f64;
                for i in 0..p {
                    for j in 0..q {
                        b[[i, j]] += a * left[i] * right[j];
                    }
                }
            }
            if numerical_rank(&b) == rank {
                break;
            }
        }
        let fro = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        b *= scale * (q as f64).sqrt() / fro;
    }

    let x = Array2::from_shape_fn((n, p), |_| normal(&mut rng));
    let mut y = x.dot(&b);
    if spec.noise > 0.0 {
        y.mapv_inplace(|v| v + spec.noise * normal(&mut rng));
    }
    Ok(LowRankData { x, y, b_star: b })
}

#[derive(Debug, Clone)]
pub struct HalfmoonData {
    /// Standardized points, one row per point.
    pub points: Array2<f64>,
    /// Points before standardization.
    pub raw: Array2<f64>,
    /// 0 for the upper moon, 1 for the lower.
    pub labels: Vec<usize>,
}

/// Two interleaved unit semicircles, `n/2` points each, with Gaussian
/// jitter; the lower moon is centred at (1, 0.5).
pub fn gen_halfmoons(spec: &SimSpec) -> Result<HalfmoonData> {
    let n = spec.n;
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "halfmoons need an even n >= 2, got {n}"
        )));
    }
    if !(spec.noise >= 0.0) {
        return Err(Error::invalid("jitter must be non-negative"));
    }
    let half = n / 2;
    let mut rng = spec.rng();
    let mut raw = Array2::<f64>::zeros((n, 2));
    let mut labels = Vec::with_capacity(n);
    for moon in 0..2 {
        for i in 0..half {
            let theta = if half == 1 {
                0.0
            } else {
                PI * i as f64 / (half - 1) as f64
            };
            let (px, py) = if moon == 0 {
                (theta.cos(), theta.sin())
            } else {
                (1.0 - theta.cos(), 0.5 - theta.sin())
            };
            let row = moon * half + i;
            raw[[row, 0]] = px;
            raw[[row, 1]] = py;
            labels.push(moon);
        }
    }
    if spec.noise > 0.0 {
        raw.mapv_inplace(|v| v + spec.noise * normal(&mut rng));
    }
    let mut points = raw.clone();
    standardize_columns(&mut points);
    Ok(HalfmoonData {
        points,
        raw,
        labels,
    })
}
