//! Lowest eigenpairs of hermitian operators.
//!
//! Small operators go through a dense hermitian eigendecomposition. Larger
//! sparse ones use Chebyshev-filtered subspace iteration: a block is
//! repeatedly multiplied by a Chebyshev polynomial in `H` that damps the
//! unwanted upper part of the spectrum, re-orthonormalized and refined by a
//! Rayleigh-Ritz step. Every returned pair is checked against its residual.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CMatrix, LinOp, Storage};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenOptions {
    /// Largest dimension solved densely.
    pub dense_cap: usize,
    /// Required residual `‖Hψ - Eψ‖ <= tol (1 + |E|)`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { dense_cap: 1024, tol: 1e-8, max_iter: 400, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    Dense,
    ChebyshevSubspace { iterations: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unit eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
    pub residuals: Vec<f64>,
    pub method: SolverMethod,
}

pub fn lowest_eigenpairs(h: &LinOp, k: usize, opts: &EigenOptions) -> Result<EigenPairs> {
    let n = h.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParam(format!("requested {k} eigenpairs of a {n}-dimensional operator")));
    }
    let pairs = if n <= opts.dense_cap || 2 * k + 8 >= n {
        dense(h, k)
    } else {
        chebyshev(h, k, opts)?
    };
    for (e, r) in pairs.values.iter().zip(&pairs.residuals) {
        if *r > opts.tol * (1.0 + e.abs()) {
            return Err(Error::SolverFailure(format!("residual {r:.3e} for eigenvalue {e} exceeds tolerance")));
        }
    }
    Ok(pairs)
}

/// All eigenvalues of a small hermitian matrix, ascending.
pub fn dense_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn sorted_eig(m: CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(eig.eigenvectors.nrows(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

fn residuals(h: &LinOp, vals: &[f64], vecs: &CMatrix) -> Vec<f64> {
    let hx = h.apply(vecs);
    (0..vals.len())
        .map(|i| (hx.column(i) - vecs.column(i) * Complex64::new(vals[i], 0.0)).norm() / vecs.column(i).norm())
        .collect()
}

fn dense(h: &LinOp, k: usize) -> EigenPairs {
    let (vals, vecs) = sorted_eig(h.to_dense());
    let values = vals[..k].to_vec();
    let vectors = vecs.columns(0, k).into_owned();
    let residuals = residuals(h, &values, &vectors);
    EigenPairs { values, vectors, residuals, method: SolverMethod::Dense }
}

/// Upper bound on the spectrum from Gershgorin discs.
pub fn gershgorin_upper(h: &LinOp) -> f64 {
    match h.storage() {
        Storage::Sparse(m) => m
            .row_iter()
            .enumerate()
            .map(|(r, row)| {
                row.col_indices()
                    .iter()
                    .zip(row.values())
                    .map(|(&c, v)| if c == r { v.re } else { v.norm() })
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max),
        Storage::Dense(m) => (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| if c == r { m[(r, c)].re } else { m[(r, c)].norm() }).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

fn rayleigh_ritz(h: &LinOp, x: CMatrix) -> (Vec<f64>, CMatrix, CMatrix) {
    let q = x.qr().q();
    let hq = h.apply(&q);
    let mut g = q.adjoint() * &hq;
    g = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let (vals, w) = sorted_eig(g);
    (vals, &q * &w, hq * w)
}

fn chebyshev(h: &LinOp, k: usize, opts: &EigenOptions) -> Result<EigenPairs> {
    let n = h.dim();
    let b = (2 * k + 8).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let x0 = CMatrix::from_fn(n, b, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let upper = gershgorin_upper(h);
    let (mut vals, mut x, mut hx) = rayleigh_ritz(h, x0);
    for iter in 1..=opts.max_iter {
        let res: Vec<f64> = (0..k)
            .map(|i| (hx.column(i) - x.column(i) * Complex64::new(vals[i], 0.0)).norm())
            .collect();
        // converge a decade below the acceptance threshold
        if res.iter().zip(&vals).all(|(r, e)| *r <= 0.1 * opts.tol * (1.0 + e.abs())) {
            let values = vals[..k].to_vec();
            let vectors = x.columns(0, k).into_owned();
            let residuals = residuals(h, &values, &vectors);
            return Ok(EigenPairs { values, vectors, residuals, method: SolverMethod::ChebyshevSubspace { iterations: iter } });
        }
        let low = vals[0];
        let mut cut = vals[b - 1];
        if cut >= upper {
            cut = 0.5 * (low + upper);
        }
        let e = 0.5 * (upper - cut);
        let c = 0.5 * (upper + cut);
        let rate = ((c - low) / e).acosh().max(1e-3);
        let degree = ((9.2 / rate).ceil() as usize).clamp(8, 300);
        let filtered = filter(h, &x, degree, low, cut, upper);
        (vals, x, hx) = rayleigh_ritz(h, filtered);
    }
    Err(Error::SolverFailure(format!("subspace iteration did not converge in {} iterations", opts.max_iter)))
}

/// Scaled Chebyshev filter damping `[cut, upper]`, normalized at `low`.
fn filter(h: &LinOp, x: &CMatrix, degree: usize, low: f64, cut: f64, upper: f64) -> CMatrix {
    let e = 0.5 * (upper - cut);
    let c = 0.5 * (upper + cut);
    let mut sigma = e / (low - c);
    let tau = 2.0 / sigma;
    let re = |v: f64| Complex64::new(v, 0.0);
    let mut prev = x.clone();
    let mut cur = (h.apply(x) - x * re(c)) * re(sigma / e);
    for _ in 2..=degree {
        let next_sigma = 1.0 / (tau - sigma);
        let next = (h.apply(&cur) - &cur * re(c)) * re(2.0 * next_sigma / e) - &prev * re(sigma * next_sigma);
        prev = cur;
        cur = next;
        sigma = next_sigma;
    }
    cur
}
