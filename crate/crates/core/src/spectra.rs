//! Hamiltonians on twisted spaces and their low spectra.
//!
//! The kinetic term is `½ Σ_j (D⁺_j)† D⁺_j` with `D⁺_j` the forward staggered
//! difference along axis `j`, twisted in the same way as the momenta. It is
//! the square of the half-step momentum `-i D⁺_j`, positive semidefinite, and
//! free of the spurious zone-boundary modes the square of the central
//! difference would carry.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::field::ScalarField;
use crate::homotopy::Pi1Representation;
use crate::linalg::eigen::{lowest_eigenpairs, EigenOptions, SolverMethod};
use crate::linalg::{LinOp, OpFlag};
use crate::manifold::{make_grid, Manifold};
use crate::operators::mult_on;
use crate::representations::RepSpace;
use crate::stencil::{difference_op, Order, Stencil};

/// Relative gap under which neighbouring eigenvalues count as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-6;

pub fn hamiltonian(s: &RepSpace, potential: Option<&ScalarField>) -> Result<LinOp> {
    hamiltonian_with_order(s, potential, Order::Two)
}

pub fn hamiltonian_with_order(s: &RepSpace, potential: Option<&ScalarField>, order: Order) -> Result<LinOp> {
    let stencil = Stencil::staggered(order);
    let mut h = LinOp::zeros(s.dim());
    for axis in 0..s.grid().dim() {
        let d = difference_op(s, axis, &stencil);
        h = h.add_scaled(&d.adjoint().compose(&d)?, num_complex::Complex64::new(0.5, 0.0))?;
    }
    if let Some(v) = potential {
        h = h.add(&mult_on(s, v)?)?;
    }
    Ok(h.with_flag(OpFlag::Hermitian))
}

/// Low spectrum of a twisted space with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub manifold: String,
    pub fiber_dim: usize,
    /// Generator matrices, row-major `(re, im)` pairs.
    pub generators: Vec<Vec<[f64; 2]>>,
    pub grid: Vec<usize>,
    pub order: Order,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub solver: SolverMethod,
}

impl SpectrumResult {
    /// Sizes of the clusters of eigenvalues closer than the degeneracy gap.
    pub fn degeneracies(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for (i, e) in self.eigenvalues.iter().enumerate() {
            if i > 0 && (e - self.eigenvalues[i - 1]).abs() <= DEGENERACY_GAP * (1.0 + e.abs()) {
                if let Some(last) = out.last_mut() {
                    *last += 1;
                }
            } else {
                out.push(1);
            }
        }
        out
    }
}

fn generator_data(r: &Pi1Representation) -> Vec<Vec<[f64; 2]>> {
    r.matrices
        .iter()
        .map(|m| {
            let k = m.nrows();
            (0..k * k).map(|i| {
                let z = m[(i / k, i % k)];
                [z.re, z.im]
            })
            .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOptions {
    pub order: Order,
    pub eigen: EigenOptions,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { order: Order::Two, eigen: EigenOptions::default() }
    }
}

/// The `k` lowest eigenvalues of `H` with residuals verified.
pub fn eigenvalues(h: &LinOp, k: usize, opts: &EigenOptions) -> Result<(Vec<f64>, Vec<f64>, SolverMethod)> {
    let p = lowest_eigenpairs(h, k, opts)?;
    Ok((p.values, p.residuals, p.method))
}

pub fn spectrum(s: &RepSpace, potential: Option<&ScalarField>, k: usize, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    let h = hamiltonian_with_order(s, potential, opts.order)?;
    let (eigenvalues, residuals, solver) = eigenvalues(&h, k, &opts.eigen)?;
    Ok(SpectrumResult {
        manifold: s.manifold().spec().to_string(),
        fiber_dim: s.fiber_dim(),
        generators: generator_data(s.rep()),
        grid: s.grid().n().to_vec(),
        order: opts.order,
        eigenvalues,
        residuals,
        solver,
    })
}

/// One spectrum per representation, in input order; entries fail
/// independently.
pub fn theta_sweep(
    m: &Manifold,
    reps: &[Pi1Representation],
    n: &[usize],
    k: usize,
    potential: Option<&ScalarField>,
    opts: &SpectrumOptions,
) -> Vec<Result<SpectrumResult>> {
    reps.par_iter()
        .map(|r| {
            let s = RepSpace::new(make_grid(m, n)?, r.clone())?;
            spectrum(&s, potential, k, opts)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homotopy::Pi1Presentation;
    use crate::linalg::Storage;
    use crate::manifold::{make_manifold, ManifoldSpec, SubBox};
    use crate::representations::build_space;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn circle() -> Manifold {
        make_manifold(ManifoldSpec::Circle { length: 2.0 * PI }).unwrap()
    }

    fn angles(t: &[f64]) -> Pi1Representation {
        let p = if t.len() == 1 { Pi1Presentation::integers() } else { Pi1Presentation::z2() };
        Pi1Representation::from_angles(p, t).unwrap()
    }

    /// `½ (m + θ/2π)²` over `m`, ascending.
    fn circle_levels(theta: f64, k: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (-20..=20).map(|m| 0.5 * (m as f64 + theta / (2.0 * PI)).powi(2)).collect();
        v.sort_by(f64::total_cmp);
        v.truncate(k);
        v
    }

    #[test]
    fn free_circle_ground_state_is_constant() {
        let s = build_space(&circle(), angles(&[0.0]), &[64]).unwrap();
        let h = hamiltonian(&s, None).unwrap();
        assert!(h.hermiticity_residual() <= 1e-12);
        let p = lowest_eigenpairs(&h, 1, &EigenOptions::default()).unwrap();
        assert!(p.values[0].abs() < 1e-12);
        let v = p.vectors.column(0);
        assert!(v.iter().all(|z| (z.norm() - v[0].norm()).abs() < 1e-10));
    }

    #[test]
    fn theta_levels_on_the_circle() {
        for theta in [0.0, 1.0, PI] {
            let s = build_space(&circle(), angles(&[theta]), &[512]).unwrap();
            let r = spectrum(&s, None, 4, &SpectrumOptions::default()).unwrap();
            for (a, b) in r.eigenvalues.iter().zip(circle_levels(theta, 4)) {
                assert!((a - b).abs() < 1e-3, "{a} {b}");
            }
        }
    }

    #[test]
    fn pi_twist_is_doubly_degenerate() {
        let s = build_space(&circle(), angles(&[PI]), &[512]).unwrap();
        let r = spectrum(&s, None, 4, &SpectrumOptions::default()).unwrap();
        assert_eq!(r.degeneracies(), vec![2, 2]);
    }

    #[test]
    fn torus_two_angles() {
        let m = make_manifold(ManifoldSpec::Torus { lengths: [2.0 * PI, 2.0 * PI] }).unwrap();
        let s = build_space(&m, angles(&[PI, 0.0]), &[32, 32]).unwrap();
        let r = spectrum(&s, None, 2, &SpectrumOptions::default()).unwrap();
        for e in r.eigenvalues {
            assert!((e - 0.125).abs() < 5e-3);
        }
    }

    #[test]
    fn sweep_keeps_order_and_periodicity() {
        let reps: Vec<_> = [0.0, PI, 2.0 * PI].iter().map(|&t| angles(&[t])).collect();
        let out = theta_sweep(&circle(), &reps, &[128], 3, None, &SpectrumOptions::default());
        let r: Vec<SpectrumResult> = out.into_iter().map(|r| r.unwrap()).collect();
        assert!(r[0].eigenvalues[0].abs() < 1e-12);
        assert!((r[1].eigenvalues[0] - 0.125).abs() < 1e-3);
        for (a, b) in r[0].eigenvalues.iter().zip(&r[2].eigenvalues) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn nonnegative_potential_raises_levels() {
        let m = circle();
        let s = build_space(&m, angles(&[0.7]), &[128]).unwrap();
        let v = ScalarField::parse(&m, "1 + cos(x)", None).unwrap();
        let free = spectrum(&s, None, 6, &SpectrumOptions::default()).unwrap();
        let pot = spectrum(&s, Some(&v), 6, &SpectrumOptions::default()).unwrap();
        for (a, b) in free.eigenvalues.iter().zip(&pot.eigenvalues) {
            assert!(b >= a);
        }
    }

    #[test]
    fn harmonic_oscillator_on_the_line() {
        let m = make_manifold(ManifoldSpec::Line { half_width: 10.0 }).unwrap();
        let s = build_space(&m, Pi1Representation::trivial(Pi1Presentation::trivial(), 1), &[1024]).unwrap();
        let v = ScalarField::potential(&m, crate::field::parse("0.5*x^2").unwrap()).unwrap();
        let opts = SpectrumOptions { order: Order::Four, ..Default::default() };
        let r = spectrum(&s, Some(&v), 6, &opts).unwrap();
        for (n, e) in r.eigenvalues.iter().enumerate() {
            assert!((e - (n as f64 + 0.5)).abs() < 1e-4, "{n}: {e}");
        }
    }

    #[test]
    fn conjugated_rep_has_the_same_spectrum() {
        let m = make_manifold(ManifoldSpec::Torus { lengths: [1.0, 1.0] }).unwrap();
        let z = Complex64::new(0.0, 0.0);
        let a = crate::linalg::CMatrix::from_row_slice(2, 2, &[Complex64::from_polar(1.0, 0.5), z, z, Complex64::from_polar(1.0, 2.0)]);
        let b = crate::linalg::CMatrix::from_row_slice(2, 2, &[Complex64::from_polar(1.0, 1.0), z, z, Complex64::from_polar(1.0, -0.3)]);
        let r = Pi1Representation::new(Pi1Presentation::z2(), vec![a, b]).unwrap();
        let c = 0.4f64;
        let u = crate::linalg::CMatrix::from_row_slice(2, 2, &[Complex64::new(c.cos(), 0.0), Complex64::new(-c.sin(), 0.0), Complex64::new(c.sin(), 0.0), Complex64::new(c.cos(), 0.0)]);
        let s1 = build_space(&m, r.clone(), &[12, 12]).unwrap();
        let s2 = s1.with_rep(r.conjugated(&u).unwrap()).unwrap();
        let e1 = spectrum(&s1, None, 8, &SpectrumOptions::default()).unwrap();
        let e2 = spectrum(&s2, None, 8, &SpectrumOptions::default()).unwrap();
        for (x, y) in e1.eigenvalues.iter().zip(&e2.eigenvalues) {
            assert!((x - y).abs() < 1e-8 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn dirichlet_block_is_a_submatrix() {
        let s = build_space(&circle(), angles(&[2.0]), &[64]).unwrap();
        let h = hamiltonian(&s, None).unwrap();
        assert!(matches!(h.storage(), Storage::Sparse(_)));
        let b = SubBox::new(vec![1.0], vec![5.0]).unwrap();
        let idx = s.dofs_in(&b);
        assert_eq!(h.submatrix(&idx, &idx).nrows(), idx.len());
    }
}
