//! Proximal operators used by the z-subproblems.

use ndarray::{Array, Array1, Array2, ArrayBase, ArrayView1, ArrayView2, Axis, Data, Dimension};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::svd;

/// Non-negative shrinkage level.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::invalid(format!(
                "threshold must be non-negative, got {value}"
            )));
        }
        Ok(Threshold(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Threshold {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Threshold::new(value)
    }
}

#[inline]
pub(crate) fn soft_scalar(x: f64, mu: f64) -> f64 {
    if x > mu {
        x - mu
    } else if x < -mu {
        x + mu
    } else {
        0.0
    }
}

/// Elementwise `sign(x)(|x| − μ)₊`.
pub fn soft_threshold<S, D>(x: &ArrayBase<S, D>, mu: Threshold) -> Array<f64, D>
where
    S: Data<Elem = f64>,
    D: Dimension,
{
    let m = mu.value();
    x.mapv(|v| soft_scalar(v, m))
}

/// Block shrinkage `[1 − τ/‖z‖₂]₊ z`; the zero vector maps to zero.
pub fn group_soft_threshold(z: ArrayView1<'_, f64>, tau: Threshold) -> Array1<f64> {
    let norm = z.dot(&z).sqrt();
    let factor = group_factor(norm, tau.value());
    if factor == 0.0 {
        Array1::zeros(z.len())
    } else {
        z.mapv(|v| v * factor)
    }
}

#[inline]
pub(crate) fn group_factor(norm: f64, tau: f64) -> f64 {
    if norm <= tau || norm == 0.0 {
        0.0
    } else {
        1.0 - tau / norm
    }
}

/// Singular value thresholding `U diag((σ − τ)₊) Vᵀ`.
///
/// The returned rank counts `σᵢ > τ` strictly.
pub fn singular_value_threshold(
    a: ArrayView2<'_, f64>,
    tau: Threshold,
) -> Result<(Array2<f64>, usize)> {
    let dec = svd(a)?;
    let t = tau.value();
    let rank = dec.singular_values.iter().filter(|&&s| s > t).count();
    if rank == 0 {
        return Ok((Array2::zeros(a.raw_dim()), 0));
    }
    // σ is sorted, so the surviving components are the leading `rank` ones
    let shrunk = dec
        .singular_values
        .slice(ndarray::s![..rank])
        .mapv(|s| s - t);
    let u = dec.u.slice(ndarray::s![.., ..rank]);
    let vt = dec.vt.slice(ndarray::s![..rank, ..]);
    let scaled = &u * &shrunk.view().insert_axis(Axis(0));
    Ok((scaled.dot(&vt), rank))
}
