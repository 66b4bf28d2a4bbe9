//! Cached ridge-system solvers and a thin SVD wrapper.
//!
//! Every β-subproblem in this crate reduces to `(XᵀX/n + I) β = c` for a
//! fixed design `X`. [`CachedRidgeSolver`] factors the relevant symmetric
//! positive-definite matrix once and reuses the factor for every solve.
//! When `p > n` it switches to the Woodbury form
//! `(XᵀX/n + I_p)⁻¹ = I_p − Xᵀ(nI_n + XXᵀ)⁻¹X`, which only needs an
//! `n × n` factorization.

use nalgebra::{linalg::Cholesky, linalg::SVD, DMatrix, DVector, Dyn};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn to_dmatrix(a: ArrayView2<'_, f64>) -> DMatrix<f64> {
    let (r, c) = a.dim();
    DMatrix::from_fn(r, c, |i, j| a[[i, j]])
}

pub(crate) fn from_dmatrix(m: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

pub(crate) fn all_finite<'a, I: IntoIterator<Item = &'a f64>>(it: I) -> bool {
    it.into_iter().all(|v| v.is_finite())
}

/// Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
    dim: usize,
}

impl SpdFactor {
    pub fn new(a: ArrayView2<'_, f64>) -> Result<Self> {
        let (r, c) = a.dim();
        if r != c {
            return Err(Error::dims(format!(
                "SPD factor needs a square matrix, got {r}x{c}"
            )));
        }
        if !all_finite(a.iter()) {
            return Err(Error::invalid("matrix contains non-finite entries"));
        }
        let chol = Cholesky::new(to_dmatrix(a))
            .ok_or_else(|| Error::invalid("matrix is not positive definite"))?;
        Ok(SpdFactor { chol, dim: r })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve_vec(&self, b: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        if b.len() != self.dim {
            return Err(Error::dims(format!(
                "right-hand side has {} rows, system has {}",
                b.len(),
                self.dim
            )));
        }
        let mut rhs = DVector::from_iterator(b.len(), b.iter().copied());
        self.chol.solve_mut(&mut rhs);
        Ok(Array1::from_iter(rhs.iter().copied()))
    }

    pub fn solve_mat(&self, b: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if b.nrows() != self.dim {
            return Err(Error::dims(format!(
                "right-hand side has {} rows, system has {}",
                b.nrows(),
                self.dim
            )));
        }
        let mut rhs = to_dmatrix(b);
        self.chol.solve_mut(&mut rhs);
        Ok(from_dmatrix(&rhs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverMode {
    /// Factor `XᵀX/n + I_p` directly.
    Direct,
    /// Factor `nI_n + XXᵀ` and apply the Woodbury identity.
    Woodbury,
}

impl SolverMode {
    /// Woodbury iff `p > n`.
    pub fn select(n: usize, p: usize) -> Self {
        if p > n {
            SolverMode::Woodbury
        } else {
            SolverMode::Direct
        }
    }
}

/// Solver for `(XᵀX/n + I) r = c` with the factorization computed once.
///
/// Immutable after construction, so one instance can back any number of
/// concurrent path runs.
#[derive(Debug, Clone)]
pub struct CachedRidgeSolver {
    mode: SolverMode,
    n: usize,
    p: usize,
    factor: SpdFactor,
    /// Design matrix, retained only in Woodbury mode.
    design: Option<Array2<f64>>,
    factorizations: usize,
}

impl CachedRidgeSolver {
    /// Builds a solver, picking the mode with [`SolverMode::select`].
    pub fn new(x: ArrayView2<'_, f64>) -> Result<Self> {
        let (n, p) = x.dim();
        Self::with_mode(x, SolverMode::select(n, p))
    }

    pub fn with_mode(x: ArrayView2<'_, f64>, mode: SolverMode) -> Result<Self> {
        let (n, p) = x.dim();
        if n == 0 || p == 0 {
            return Err(Error::invalid(format!(
                "design matrix must be non-empty, got {n}x{p}"
            )));
        }
        if !all_finite(x.iter()) {
            return Err(Error::invalid("design matrix contains non-finite entries"));
        }
        let nf = n as f64;
        let (gram, design) = match mode {
            SolverMode::Direct => {
                let mut g = x.t().dot(&x) / nf;
                g.diag_mut().mapv_inplace(|d| d + 1.0);
                (g, None)
            }
            SolverMode::Woodbury => {
                let mut g = x.dot(&x.t());
                g.diag_mut().mapv_inplace(|d| d + nf);
                (g, Some(x.to_owned()))
            }
        };
        let factor = SpdFactor::new(gram.view())?;
        Ok(CachedRidgeSolver {
            mode,
            n,
            p,
            factor,
            design,
            factorizations: 1,
        })
    }

    pub fn mode(&self) -> SolverMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of factorizations performed; stays at 1 for the solver's lifetime.
    pub fn factorization_count(&self) -> usize {
        self.factorizations
    }

    pub fn solve_vec(&self, c: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        if c.len() != self.p {
            return Err(Error::dims(format!(
                "right-hand side has {} rows, expected p = {}",
                c.len(),
                self.p
            )));
        }
        match &self.design {
            None => self.factor.solve_vec(c),
            Some(x) => {
                let w = self.factor.solve_vec(x.dot(&c).view())?;
                Ok(&c - &x.t().dot(&w))
            }
        }
    }

    pub fn solve_mat(&self, c: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if c.nrows() != self.p {
            return Err(Error::dims(format!(
                "right-hand side has {} rows, expected p = {}",
                c.nrows(),
                self.p
            )));
        }
        match &self.design {
            None => self.factor.solve_mat(c),
            Some(x) => {
                let w = self.factor.solve_mat(x.dot(&c).view())?;
                Ok(&c - &x.t().dot(&w))
            }
        }
    }

    /// Applies `XᵀX/n + I` to `r`; used for residual checks.
    pub fn apply(x: ArrayView2<'_, f64>, r: ArrayView1<'_, f64>) -> Array1<f64> {
        let n = x.nrows() as f64;
        x.t().dot(&x.dot(&r)) / n + r
    }
}

/// Thin SVD `A = U diag(σ) Vᵀ` with σ sorted non-increasing.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Array2<f64>,
    pub singular_values: Array1<f64>,
    pub vt: Array2<f64>,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Array2<f64> {
        let scaled = &self.u * &self.singular_values.view().insert_axis(Axis(0));
        scaled.dot(&self.vt)
    }
}

pub fn svd(a: ArrayView2<'_, f64>) -> Result<SvdResult> {
    if !all_finite(a.iter()) {
        return Err(Error::invalid("SVD input contains non-finite entries"));
    }
    let (m, n) = a.dim();
    let k = m.min(n);
    if k == 0 {
        return Ok(SvdResult {
            u: Array2::zeros((m, 0)),
            singular_values: Array1::zeros(0),
            vt: Array2::zeros((0, n)),
        });
    }
    let dec = SVD::new(to_dmatrix(a), true, true);
    let u = dec.u.as_ref().expect("requested U");
    let vt = dec.v_t.as_ref().expect("requested Vᵀ");
    let sv = &dec.singular_values;

    let mut order: Vec<usize> = (0..k).collect();
    // stable sort keeps the backend's order on ties, so output is deterministic
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));

    let u_out = Array2::from_shape_fn((m, k), |(r, c)| u[(r, order[c])]);
    let vt_out = Array2::from_shape_fn((k, n), |(r, c)| vt[(order[r], c)]);
    let s_out = Array1::from_iter(order.iter().map(|&i| sv[i].max(0.0)));
    Ok(SvdResult {
        u: u_out,
        singular_values: s_out,
        vt: vt_out,
    })
}

/// Largest singular value.
pub fn spectral_norm(a: ArrayView2<'_, f64>) -> Result<f64> {
    Ok(svd(a)?.singular_values.first().copied().unwrap_or(0.0))
}

pub fn frobenius_norm(a: ArrayView2<'_, f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}
