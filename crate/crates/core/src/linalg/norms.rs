use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{CMatrix, CVector, LinOp};

/// Which norm a residual was measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// Largest singular value.
    Spectral,
    /// Largest singular value restricted to an orthonormal set of smooth probe states.
    Probe,
    /// Largest entry modulus.
    MaxAbs,
}

const LANCZOS_STEPS: usize = 300;

/// Largest singular value, by Lanczos on `A†A` with full reorthogonalization.
pub fn spectral_norm(a: &LinOp) -> f64 {
    let n = a.dim();
    if n == 0 || a.frobenius() == 0.0 {
        return 0.0;
    }
    let ah = a.adjoint();
    largest_eigenvalue(n, |x| ah.apply_vec(&a.apply_vec(x))).max(0.0).sqrt()
}

/// Largest eigenvalue of a hermitian positive semidefinite map.
fn largest_eigenvalue(n: usize, apply: impl Fn(&CVector) -> CVector) -> f64 {
    let m = n.min(LANCZOS_STEPS);
    // fixed, generic start vector so results are reproducible
    let mut q = CVector::from_fn(n, |i, _| {
        let t = i as f64;
        num_complex::Complex64::new((1.3 * t + 0.4).sin() + 1.1, (0.7 * t).cos())
    });
    q /= num_complex::Complex64::new(q.norm(), 0.0);
    let mut basis: Vec<CVector> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    for j in 0..m {
        let mut w = apply(&q);
        let a = q.dotc(&w).re;
        alpha.push(a);
        basis.push(q.clone());
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w.axpy(-c, b, num_complex::Complex64::new(1.0, 0.0));
            }
        }
        let nb = w.norm();
        let scale = alpha.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if j + 1 == m || nb <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        beta.push(nb);
        q = w / num_complex::Complex64::new(nb, 0.0);
    }
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    SymmetricEigen::new(t).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `‖A Q‖₂` for a matrix `Q` with orthonormal columns.
pub fn probe_norm(a: &LinOp, probes: &CMatrix) -> f64 {
    matrix_norm2(&a.apply(probes))
}

/// Largest singular value of a tall matrix, via its Gram matrix.
pub fn matrix_norm2(b: &CMatrix) -> f64 {
    let g = b.adjoint() * b;
    SymmetricEigen::new(g).eigenvalues.iter().copied().fold(0.0f64, f64::max).sqrt()
}

/// Orthonormal basis for the column span, `A R⁻¹` from a thin QR so that
/// rows vanishing in `A` stay exactly zero.
pub fn orthonormalize(cols: CMatrix) -> CMatrix {
    let k = cols.ncols();
    let r = cols.clone().qr().r();
    let rinv = r.solve_upper_triangular(&CMatrix::identity(k, k)).unwrap_or_else(|| CMatrix::identity(k, k));
    cols * rinv
}
