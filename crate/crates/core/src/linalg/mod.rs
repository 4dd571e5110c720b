//! Complex operators on grid state vectors, stored dense or in CSR form.

pub mod eigen;
pub mod norms;

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type Csr = CsrMatrix<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpFlag {
    Hermitian,
    Unitary,
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    Dense(CMatrix),
    Sparse(Csr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinOp {
    storage: Storage,
    flag: OpFlag,
}

impl LinOp {
    pub fn dense(m: CMatrix, flag: OpFlag) -> Self {
        LinOp { storage: Storage::Dense(m), flag }
    }

    pub fn sparse(m: Csr, flag: OpFlag) -> Self {
        LinOp { storage: Storage::Sparse(m), flag }
    }

    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, Complex64)], flag: OpFlag) -> Self {
        let mut coo = CooMatrix::new(n, n);
        for &(r, c, v) in triplets {
            coo.push(r, c, v);
        }
        LinOp::sparse(Csr::from(&coo), flag)
    }

    pub fn identity(n: usize) -> Self {
        LinOp::sparse(Csr::identity(n), OpFlag::Unitary)
    }

    pub fn zeros(n: usize) -> Self {
        LinOp::sparse(Csr::zeros(n, n), OpFlag::Hermitian)
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let flag = if values.iter().all(|v| v.im == 0.0) { OpFlag::Hermitian } else { OpFlag::General };
        let t: Vec<_> = values.iter().enumerate().filter(|(_, v)| **v != ZERO).map(|(i, v)| (i, i, *v)).collect();
        LinOp::from_triplets(values.len(), &t, flag)
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn flag(&self) -> OpFlag {
        self.flag
    }

    pub fn with_flag(mut self, flag: OpFlag) -> Self {
        self.flag = flag;
        self
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Dense(m) => m.nrows(),
            Storage::Sparse(m) => m.nrows(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn to_dense(&self) -> CMatrix {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(m) => {
                let mut d = CMatrix::zeros(m.nrows(), m.ncols());
                for (r, c, v) in m.triplet_iter() {
                    d[(r, c)] += *v;
                }
                d
            }
        }
    }

    pub fn into_dense(self) -> LinOp {
        let flag = self.flag;
        LinOp::dense(self.to_dense(), flag)
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        match &self.storage {
            Storage::Dense(m) => m[(r, c)],
            Storage::Sparse(m) => m.get_entry(r, c).map_or(ZERO, |e| e.into_value()),
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CMatrix {
        CMatrix::from_fn(rows.len(), cols.len(), |i, j| self.entry(rows[i], cols[j]))
    }

    pub fn apply_vec(&self, x: &CVector) -> CVector {
        match &self.storage {
            Storage::Dense(m) => m * x,
            Storage::Sparse(m) => {
                let mut y = CVector::zeros(m.nrows());
                for (r, row) in m.row_iter().enumerate() {
                    let mut acc = ZERO;
                    for (&c, v) in row.col_indices().iter().zip(row.values()) {
                        acc += v * x[c];
                    }
                    y[r] = acc;
                }
                y
            }
        }
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        match &self.storage {
            Storage::Dense(m) => m * x,
            Storage::Sparse(m) => m * x,
        }
    }

    pub fn adjoint(&self) -> LinOp {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.adjoint()),
            Storage::Sparse(m) => {
                let mut t = m.transpose();
                for v in t.values_mut() {
                    *v = v.conj();
                }
                Storage::Sparse(t)
            }
        };
        LinOp { storage, flag: self.flag }
    }

    pub fn scale(&self, c: Complex64) -> LinOp {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m * c),
            Storage::Sparse(m) => {
                let mut s = m.clone();
                for v in s.values_mut() {
                    *v *= c;
                }
                Storage::Sparse(s)
            }
        };
        let flag = match self.flag {
            OpFlag::Hermitian if c.im == 0.0 => OpFlag::Hermitian,
            OpFlag::Unitary if (c.norm() - 1.0).abs() < 1e-15 => OpFlag::Unitary,
            _ => OpFlag::General,
        };
        LinOp { storage, flag }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &LinOp, c: Complex64) -> Result<LinOp> {
        self.same_dim(other)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => {
                let mut coo = CooMatrix::new(a.nrows(), a.ncols());
                for (r, col, v) in a.triplet_iter() {
                    coo.push(r, col, *v);
                }
                for (r, col, v) in b.triplet_iter() {
                    coo.push(r, col, c * v);
                }
                Storage::Sparse(Csr::from(&coo))
            }
            _ => Storage::Dense(self.to_dense() + other.to_dense() * c),
        };
        let flag = if self.flag == OpFlag::Hermitian && other.flag == OpFlag::Hermitian && c.im == 0.0 {
            OpFlag::Hermitian
        } else {
            OpFlag::General
        };
        Ok(LinOp { storage, flag })
    }

    pub fn sub(&self, other: &LinOp) -> Result<LinOp> {
        self.add_scaled(other, -ONE)
    }

    pub fn add(&self, other: &LinOp) -> Result<LinOp> {
        self.add_scaled(other, ONE)
    }

    /// Product `self * other`.
    pub fn compose(&self, other: &LinOp) -> Result<LinOp> {
        self.same_dim(other)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a * b),
            (Storage::Sparse(a), Storage::Dense(b)) => Storage::Dense(a * b),
            (Storage::Dense(a), Storage::Sparse(b)) => {
                // A B = (B^† A^†)^†
                let mut bt = b.transpose();
                for v in bt.values_mut() {
                    *v = v.conj();
                }
                Storage::Dense((&bt * &a.adjoint()).adjoint())
            }
            (Storage::Dense(a), Storage::Dense(b)) => Storage::Dense(a * b),
        };
        let flag = if self.flag == OpFlag::Unitary && other.flag == OpFlag::Unitary {
            OpFlag::Unitary
        } else {
            OpFlag::General
        };
        Ok(LinOp { storage, flag })
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &LinOp) -> Result<LinOp> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    pub fn frobenius(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.norm(),
            Storage::Sparse(m) => m.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        let it: Box<dyn Iterator<Item = &Complex64>> = match &self.storage {
            Storage::Dense(m) => Box::new(m.iter()),
            Storage::Sparse(m) => Box::new(m.values().iter()),
        };
        it.map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `‖A - A†‖_F / ‖A‖_F`, zero for the zero operator.
    pub fn hermiticity_residual(&self) -> f64 {
        let norm = self.frobenius();
        if norm == 0.0 {
            return 0.0;
        }
        self.sub(&self.adjoint()).map_or(f64::INFINITY, |d| d.frobenius()) / norm
    }

    /// `‖A†A - 1‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        match self.adjoint().compose(self) {
            Ok(p) => p.sub(&LinOp::identity(n)).map_or(f64::INFINITY, |d| d.frobenius()),
            Err(_) => f64::INFINITY,
        }
    }

    /// Checks the invariant attached to the flag.
    pub fn check_flag(&self) -> Result<()> {
        match self.flag {
            OpFlag::Hermitian => {
                let r = self.hermiticity_residual();
                if r > HERMITIAN_TOL {
                    return Err(Error::InvalidParam(format!("operator flagged hermitian has residual {r:.3e}")));
                }
            }
            OpFlag::Unitary => {
                let r = self.unitarity_residual();
                if r > UNITARY_TOL {
                    return Err(Error::InvalidParam(format!("operator flagged unitary has residual {r:.3e}")));
                }
            }
            OpFlag::General => {}
        }
        Ok(())
    }

    fn same_dim(&self, other: &LinOp) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(())
    }
}

/// Kronecker product `a ⊗ 1_k` for a sparse scalar operator and fiber size `k`.
pub fn kron_identity(a: &LinOp, k: usize) -> LinOp {
    if k == 1 {
        return a.clone();
    }
    let n = a.dim() * k;
    let mut t = Vec::new();
    match a.storage() {
        Storage::Sparse(m) => {
            for (r, c, v) in m.triplet_iter() {
                for f in 0..k {
                    t.push((r * k + f, c * k + f, *v));
                }
            }
        }
        Storage::Dense(m) => {
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    if m[(r, c)] != ZERO {
                        for f in 0..k {
                            t.push((r * k + f, c * k + f, m[(r, c)]));
                        }
                    }
                }
            }
        }
    }
    LinOp::from_triplets(n, &t, a.flag())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> LinOp {
        LinOp::from_triplets(3, &[(0, 1, c(1.0, 2.0)), (1, 0, c(1.0, -2.0)), (2, 2, c(3.0, 0.0)), (2, 2, c(1.0, 0.0))], OpFlag::Hermitian)
    }

    #[test]
    fn duplicates_are_summed_and_hermitian_checks_pass() {
        let a = sample();
        assert_eq!(a.entry(2, 2), c(4.0, 0.0));
        assert_eq!(a.hermiticity_residual(), 0.0);
        assert!(a.check_flag().is_ok());
        let b = LinOp::from_triplets(2, &[(0, 1, c(1.0, 0.0))], OpFlag::Hermitian);
        assert!(b.check_flag().is_err());
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        let a = sample();
        let d = a.clone().into_dense();
        let x = CVector::from_vec(vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 1.0)]);
        assert!((a.apply_vec(&x) - d.apply_vec(&x)).norm() < 1e-15);
        let p1 = a.compose(&d).unwrap().to_dense();
        let p2 = d.compose(&a).unwrap().to_dense();
        let p3 = a.compose(&a).unwrap().to_dense();
        assert!((&p1 - &p3).norm() < 1e-14 && (&p2 - &p3).norm() < 1e-14);
        assert!((a.adjoint().to_dense() - d.to_dense().adjoint()).norm() == 0.0);
        let s = a.add_scaled(&d, c(0.0, 1.0)).unwrap().to_dense();
        assert!((s - d.to_dense() * c(1.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn identity_is_unitary_and_kron_repeats_blocks() {
        assert_eq!(LinOp::identity(4).unitarity_residual(), 0.0);
        let k = kron_identity(&sample(), 2);
        assert_eq!(k.dim(), 6);
        assert_eq!(k.entry(1, 3), c(1.0, 2.0));
        assert_eq!(k.entry(0, 3), ZERO);
    }
}
