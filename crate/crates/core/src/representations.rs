//! Twisted representation spaces: sections over the grid with values in the
//! fiber `C^k`, glued across identified edges by a unitary representation of
//! the fundamental group.
//!
//! Convention: a state on the cover satisfies `ψ̃(u·p) = R(u) ψ(p)` for a
//! deck class `u`. On the circle with `R(a) = e^{iθ}` this is
//! `ψ(x + L) = e^{iθ} ψ(x)`, so `-i d/dx` has spectrum `n + θ/2π`, and the
//! translation by a full period acts as the scalar `R(a)⁻¹`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{bump, Expr, ScalarField, VectorField};
use crate::flows::{FlowMap, FlowWord};
use crate::homotopy::{CMatrix, HomotopyClass, Pi1Representation};
use crate::linalg::eigen::{dense_eigenvalues, lowest_eigenpairs, EigenOptions};
use crate::linalg::norms::{matrix_norm2, NormKind};
use crate::linalg::{CVector, LinOp};
use crate::manifold::{make_grid, Grid, Manifold, SubBox};
use crate::operators::{self, ResidualReport};
use crate::probes;
use crate::spectra;
use crate::stencil::Order;
use crate::transport;

#[derive(Debug, Clone, PartialEq)]
pub struct RepSpace {
    grid: Grid,
    rep: Pi1Representation,
}

impl RepSpace {
    pub fn new(grid: Grid, rep: Pi1Representation) -> Result<Self> {
        if &rep.presentation != grid.manifold().presentation() {
            return Err(Error::PresentationMismatch);
        }
        Ok(RepSpace { grid, rep })
    }

    /// Scalar wave functions with the trivial representation.
    pub fn untwisted(grid: Grid) -> Self {
        let rep = Pi1Representation::trivial(grid.manifold().presentation().clone(), 1);
        RepSpace { grid, rep }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn manifold(&self) -> &Manifold {
        self.grid.manifold()
    }

    pub fn rep(&self) -> &Pi1Representation {
        &self.rep
    }

    pub fn fiber_dim(&self) -> usize {
        self.rep.fiber_dim
    }

    /// Number of complex degrees of freedom, nodes times fiber.
    pub fn dim(&self) -> usize {
        self.grid.len() * self.rep.fiber_dim
    }

    pub fn twist(&self, u: &HomotopyClass) -> CMatrix {
        self.rep.evaluate(u)
    }

    /// `Σ_p w ⟨a(p), b(p)⟩` with the uniform quadrature weight.
    pub fn inner(&self, a: &CVector, b: &CVector) -> Complex64 {
        a.dotc(b) * self.grid.weight()
    }

    pub fn norm(&self, a: &CVector) -> f64 {
        self.inner(a, a).re.sqrt()
    }

    /// Same grid and space, different representation.
    pub fn with_rep(&self, rep: Pi1Representation) -> Result<Self> {
        RepSpace::new(self.grid.clone(), rep)
    }

    /// Flat indices of the nodes inside `b`.
    pub fn nodes_in(&self, b: &SubBox) -> Vec<usize> {
        (0..self.grid.len()).filter(|&p| b.contains(&self.grid.point(p))).collect()
    }

    /// Degree-of-freedom indices of the nodes inside `b`.
    pub fn dofs_in(&self, b: &SubBox) -> Vec<usize> {
        let k = self.fiber_dim();
        self.nodes_in(b).into_iter().flat_map(|p| (0..k).map(move |f| p * k + f)).collect()
    }
}

pub fn build_space(m: &Manifold, rep: Pi1Representation, n: &[usize]) -> Result<RepSpace> {
    RepSpace::new(make_grid(m, n)?, rep)
}

pub fn rep_mult(s: &RepSpace, f: &ScalarField) -> Result<LinOp> {
    operators::mult_on(s, f)
}

pub fn rep_momentum(s: &RepSpace, v: &VectorField) -> Result<LinOp> {
    operators::momentum_on(s, v, Order::Two)
}

/// `exp(-iλ T_v)` on the twisted space.
pub fn rep_unitary_from_flow(s: &RepSpace, v: &VectorField, lambda: f64) -> Result<LinOp> {
    operators::unitary(&rep_momentum(s, v)?, lambda)
}

/// The same unitary by transport along the flow of `v`.
pub fn rep_transport(s: &RepSpace, v: &VectorField, lambda: f64, steps: usize) -> Result<LinOp> {
    transport::transport_op(s, &FlowWord::single(FlowMap::new(v, lambda, steps)?))
}

/// Largest `‖V_g(hx) V_h(x) - V_{gh}(x)‖₂` over the sample points.
pub fn check_cocycle(s: &RepSpace, g: &FlowWord, h: &FlowWord, samples: &[Vec<f64>]) -> Result<ResidualReport> {
    let m = s.manifold();
    let gh = g.after(h);
    let mut worst = 0.0f64;
    for x in samples {
        let (_, hx) = m.reduce_point(&h.forward(x)?);
        let lhs = transport::cocycle_value(s, g, &hx)? * transport::cocycle_value(s, h, x)?;
        let rhs = transport::cocycle_value(s, &gh, x)?;
        worst = worst.max(matrix_norm2(&(lhs - rhs)));
    }
    let mut params = BTreeMap::new();
    params.insert("samples".into(), json!(samples.len()));
    params.insert("fiber-dim".into(), json!(s.fiber_dim()));
    Ok(ResidualReport::new("cocycle", params, s.grid(), worst, NormKind::Spectral))
}

/// Discrepancies between a twisted space and the untwisted one on a box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalComparison {
    pub multiplication: f64,
    pub momentum: f64,
    pub unitary: f64,
    pub dirichlet_spectrum: f64,
}

impl LocalComparison {
    pub fn max(&self) -> f64 {
        self.multiplication.max(self.momentum).max(self.unitary).max(self.dirichlet_spectrum)
    }
}

/// Grid steps a box must keep from every face of the domain.
pub const LOCAL_MARGIN_STEPS: f64 = 4.0;

/// Bump test data supported in `b`: the function `Π bump((x_a - c_a)/r_a)`.
fn box_bump(m: &Manifold, b: &SubBox) -> Expr {
    let c = b.center();
    (0..m.dim()).fold(Expr::Num(1.0), |acc, a| {
        let r = 0.5 * (b.hi[a] - b.lo[a]);
        let u = Expr::div(Expr::sub(Expr::var(a), Expr::Num(c[a])), Expr::Num(r));
        Expr::mul(acc, Expr::bump(u))
    })
}

/// Compares matrix elements of functions, momenta and a flow unitary between
/// probe states supported in `b`, and the Dirichlet kinetic spectrum of the
/// box, against the untwisted space.
pub fn compare_locally(s: &RepSpace, b: &SubBox) -> Result<LocalComparison> {
    let m = s.manifold();
    let grid = s.grid();
    let margin: Vec<f64> = grid.h().iter().map(|h| LOCAL_MARGIN_STEPS * h).collect();
    if b.dim() != m.dim() || !m.box_inside(b, &margin) {
        return Err(Error::BoxTouchesEdge(format!("{:?} .. {:?}", b.lo, b.hi)));
    }
    let flat = RepSpace::untwisted(grid.clone());
    let k = s.fiber_dim();
    let f = ScalarField::new(m, box_bump(m, b), Some(b.clone()))?;
    let comps: Vec<Expr> = (0..m.dim())
        .map(|a| Expr::mul(Expr::Num(1.0 + 0.5 * a as f64), box_bump(m, b)))
        .collect();
    let v = VectorField::new(m, comps, Some(b.clone()))?;
    let lambda = 0.2 * (b.hi[0] - b.lo[0]);
    let g = FlowWord::single(FlowMap::new(&v, lambda, 64)?);

    let packets = probes::packets(&flat, b);
    let elements = |tw: &LinOp, un: &LinOp| -> f64 {
        let mut worst = 0.0f64;
        for pi in &packets {
            for pj in &packets {
                let (a_un, b_un) = (CVector::from_column_slice(pi), CVector::from_column_slice(pj));
                let expect = flat.inner(&a_un, &un.apply_vec(&b_un));
                for fa in 0..k {
                    for fb in 0..k {
                        let lift = |v: &[Complex64], f: usize| {
                            let mut out = CVector::zeros(s.dim());
                            for (p, z) in v.iter().enumerate() {
                                out[p * k + f] = *z;
                            }
                            out
                        };
                        let got = s.inner(&lift(pi, fa), &tw.apply_vec(&lift(pj, fb)));
                        let e = if fa == fb { expect } else { Complex64::new(0.0, 0.0) };
                        worst = worst.max((got - e).norm());
                    }
                }
            }
        }
        worst
    };
    let multiplication = elements(&rep_mult(s, &f)?, &rep_mult(&flat, &f)?);
    let momentum = elements(&rep_momentum(s, &v)?, &rep_momentum(&flat, &v)?);
    let unitary = elements(&transport::transport_op(s, &g)?, &transport::transport_op(&flat, &g)?);

    // The box block of the twisted kinetic operator splits over fiber
    // components when its cross-fiber entries vanish; its spectrum is then
    // the union of the component spectra.
    let nodes = s.nodes_in(b);
    let h_tw = spectra::hamiltonian(s, None)?;
    let h_un = spectra::hamiltonian(&flat, None)?.submatrix(&nodes, &nodes);
    let e_un = dense_eigenvalues(&h_un);
    let mut dirichlet_spectrum = 0.0f64;
    for fa in 0..k {
        let ia: Vec<usize> = nodes.iter().map(|p| p * k + fa).collect();
        for fb in 0..k {
            let ib: Vec<usize> = nodes.iter().map(|p| p * k + fb).collect();
            let block = h_tw.submatrix(&ia, &ib);
            if fa != fb {
                dirichlet_spectrum = dirichlet_spectrum.max(block.iter().map(|z| z.norm()).fold(0.0, f64::max));
            } else {
                let e = dense_eigenvalues(&block);
                let d = e.iter().zip(&e_un).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                dirichlet_spectrum = dirichlet_spectrum.max(d);
            }
        }
    }
    Ok(LocalComparison { multiplication, momentum, unitary, dirichlet_spectrum })
}

pub fn check_locally_schroedinger(s: &RepSpace, b: &SubBox) -> Result<ResidualReport> {
    let c = compare_locally(s, b)?;
    let mut params = BTreeMap::new();
    params.insert("box-lo".into(), json!(b.lo));
    params.insert("box-hi".into(), json!(b.hi));
    params.insert("parts".into(), serde_json::to_value(&c).unwrap_or_default());
    Ok(ResidualReport::new("locally-schroedinger", params, s.grid(), c.max(), NormKind::MaxAbs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equivalent,
    Distinct,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    pub max_trace_difference: f64,
    pub max_eigenvalue_difference: f64,
    pub eigenvalues_compared: usize,
}

pub const TRACE_AGREE_TOL: f64 = 1e-10;
pub const TRACE_DISTINCT_TOL: f64 = 1e-6;
pub const EQUIVALENCE_LEVELS: usize = 10;

/// Evidence for or against unitary equivalence: characters on the probe
/// classes and the low free spectrum.
pub fn check_equivalence(s1: &RepSpace, s2: &RepSpace, classes: &[HomotopyClass]) -> Result<EquivalenceReport> {
    if s1.manifold().spec() != s2.manifold().spec() || s1.grid().n() != s2.grid().n() {
        return Err(Error::InvalidParam("equivalence needs both spaces on the same grid".into()));
    }
    if s1.fiber_dim() != s2.fiber_dim() {
        return Err(Error::DimensionMismatch(format!("fiber dimensions {} and {}", s1.fiber_dim(), s2.fiber_dim())));
    }
    let t1 = s1.rep().conjugacy_invariants(classes);
    let t2 = s2.rep().conjugacy_invariants(classes);
    let max_trace_difference = t1.iter().zip(&t2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let levels = EQUIVALENCE_LEVELS.min(s1.dim());
    let opts = EigenOptions::default();
    let e1 = lowest_eigenpairs(&spectra::hamiltonian(s1, None)?, levels, &opts)?.values;
    let e2 = lowest_eigenpairs(&spectra::hamiltonian(s2, None)?, levels, &opts)?.values;
    let mut spectra_agree = true;
    let mut max_eigenvalue_difference = 0.0f64;
    for (a, b) in e1.iter().zip(&e2) {
        let d = (a - b).abs();
        max_eigenvalue_difference = max_eigenvalue_difference.max(d);
        if d > 10.0 * opts.tol * (1.0 + a.abs()) {
            spectra_agree = false;
        }
    }
    let verdict = if max_trace_difference > TRACE_DISTINCT_TOL {
        Verdict::Distinct
    } else if max_trace_difference <= TRACE_AGREE_TOL && spectra_agree {
        Verdict::Equivalent
    } else {
        Verdict::Inconclusive
    };
    Ok(EquivalenceReport { verdict, max_trace_difference, max_eigenvalue_difference, eigenvalues_compared: levels })
}

/// Largest relative difference of the two unitary constructions on a set of
/// states, next to the error expected from the discretization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitaryAgreement {
    pub difference: f64,
    /// A priori bound: cubic interpolation plus the dispersion of the
    /// difference stencil over the flow time.
    pub bound: f64,
}

/// Compares `exp(-iλT_v)` with the transport unitary on normalized states.
pub fn compare_unitaries(
    s: &RepSpace,
    v: &VectorField,
    lambda: f64,
    order: Order,
    states: &[CVector],
    max_wavenumber: f64,
) -> Result<UnitaryAgreement> {
    let t = operators::momentum_on(s, v, order)?;
    let ue = operators::unitary(&t, lambda)?;
    let steps = 256;
    let ut = rep_transport(s, v, lambda, steps)?;
    let mut difference = 0.0f64;
    for psi in states {
        let n = psi.norm();
        let d = (ue.apply_vec(psi) - ut.apply_vec(psi)).norm() / n;
        difference = difference.max(d);
    }
    let h = s.grid().h().iter().copied().fold(0.0, f64::max);
    let vmax = sup_norm(v, s.grid())?;
    let kk = max_wavenumber;
    let p = match order {
        Order::Two => 2,
        Order::Four => 4,
    };
    let dispersion = lambda.abs() * vmax * kk.powi(p + 1) * h.powi(p) / if p == 2 { 6.0 } else { 30.0 };
    let interp = transport::interpolation_constant(h) * kk.powi(4) * s.grid().dim() as f64;
    // the envelope of a state contributes derivatives comparable to its
    // carrier; a factor of four covers both
    Ok(UnitaryAgreement { difference, bound: 4.0 * (dispersion + interp) })
}

fn sup_norm(v: &VectorField, grid: &Grid) -> Result<f64> {
    let mut m = 0.0f64;
    for p in grid.points() {
        for c in v.eval(&p)? {
            m = m.max(c.abs());
        }
    }
    Ok(m)
}

/// Random smooth states `Σ_{|m_a| <= M} c_m Π_a e^{i (m_a + θ_a/2π) 2π x_a / L_a}`
/// on a space with all axes periodic and a one-dimensional representation
/// `R(g_a) = e^{iθ_a}`. These satisfy the twisted gluing exactly.
pub fn twisted_waves(s: &RepSpace, count: usize, max_mode: i64, seed: u64) -> Result<Vec<CVector>> {
    let m = s.manifold();
    let d = m.dim();
    let abelian = matches!(m.presentation().kind, crate::homotopy::GroupKind::FreeAbelian(r) if r == d);
    if !abelian || s.fiber_dim() != 1 || (0..d).any(|a| !m.is_periodic(a)) {
        return Err(Error::InvalidParam("twisted waves need a torus-like manifold and a one-dimensional rep".into()));
    }
    let theta: Vec<f64> = s.rep().matrices.iter().map(|r| r[(0, 0)].arg()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..d {
        modes = modes.into_iter().flat_map(|v| (-max_mode..=max_mode).map(move |j| [v.clone(), vec![j]].concat())).collect();
    }
    let points = s.grid().points();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let coef: Vec<Complex64> =
            modes.iter().map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let psi = CVector::from_iterator(
            points.len(),
            points.iter().map(|x| {
                modes.iter().zip(&coef).fold(Complex64::new(0.0, 0.0), |acc, (mode, c)| {
                    let phase: f64 = (0..d)
                        .map(|a| (mode[a] as f64 + theta[a] / (2.0 * PI)) * 2.0 * PI * (x[a] - m.lo()[a]) / m.length(a))
                        .sum();
                    acc + c * Complex64::from_polar(1.0, phase)
                })
            }),
        );
        out.push(psi);
    }
    Ok(out)
}

/// `bump((x-c)/w) e^{ikx}` sampled and tensored with a fiber vector.
pub fn packet_state(s: &RepSpace, center: &[f64], width: f64, k: &[f64], fiber: &[Complex64]) -> CVector {
    let grid = s.grid();
    let kf = s.fiber_dim();
    let mut out = CVector::zeros(s.dim());
    for p in 0..grid.len() {
        let x = grid.point(p);
        let mut amp = 1.0;
        let mut phase = 0.0;
        for a in 0..x.len() {
            amp *= bump((x[a] - center[a]) / width);
            phase += k[a] * x[a];
        }
        let z = Complex64::from_polar(amp, phase);
        for f in 0..kf {
            out[p * kf + f] = z * fiber[f];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homotopy::Pi1Presentation;
    use crate::linalg::norms::spectral_norm;
    use crate::linalg::{kron_identity, ONE};
    use crate::manifold::{make_manifold, ManifoldSpec};

    fn circle() -> Manifold {
        make_manifold(ManifoldSpec::Circle { length: 2.0 * PI }).unwrap()
    }

    fn theta_space(theta: f64, n: usize) -> RepSpace {
        build_space(&circle(), Pi1Representation::from_angles(Pi1Presentation::integers(), &[theta]).unwrap(), &[n])
            .unwrap()
    }

    pub(crate) fn klein_irrep(phi: f64) -> Pi1Representation {
        let z = Complex64::new(0.0, 0.0);
        let ra = CMatrix::from_row_slice(2, 2, &[Complex64::from_polar(1.0, phi), z, z, Complex64::from_polar(1.0, -phi)]);
        let rb = CMatrix::from_row_slice(2, 2, &[z, ONE, ONE, z]);
        Pi1Representation::new(Pi1Presentation::klein_bottle(), vec![ra, rb]).unwrap()
    }

    #[test]
    fn presentation_must_match() {
        let r = Pi1Representation::trivial(Pi1Presentation::z2(), 1);
        assert!(matches!(build_space(&circle(), r, &[16]), Err(Error::PresentationMismatch)));
    }

    #[test]
    fn trivial_rep_reproduces_untwisted_operators() {
        let m = circle();
        let s = theta_space(0.0, 64);
        let flat = RepSpace::untwisted(s.grid().clone());
        let v = VectorField::parse(&m, &["cos(x)"], None).unwrap();
        let a = rep_momentum(&s, &v).unwrap().to_dense();
        let b = operators::momentum_op(s.grid(), &v).unwrap().to_dense();
        assert_eq!(a, b);
        assert_eq!(rep_momentum(&flat, &v).unwrap().to_dense(), b);
    }

    #[test]
    fn twisted_momentum_spectrum() {
        let m = circle();
        let theta = 0.7;
        let s = theta_space(theta, 512);
        let t = rep_momentum(&s, &VectorField::parse(&m, &["1"], None).unwrap()).unwrap();
        let ev = dense_eigenvalues(&t.to_dense());
        let shift = theta / (2.0 * PI);
        for n in -3i32..=3 {
            let target = n as f64 + shift;
            let best = ev.iter().map(|e| (e - target).abs()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-3, "{target}: {best}");
        }
    }

    #[test]
    fn multiplication_ignores_the_twist() {
        let m = circle();
        let f = ScalarField::parse(&m, "sin(x)", None).unwrap();
        assert_eq!(rep_mult(&theta_space(0.3, 32), &f).unwrap(), rep_mult(&theta_space(2.1, 32), &f).unwrap());
    }

    #[test]
    fn full_loop_is_the_inverse_holonomy() {
        let m = circle();
        for theta in [0.0, PI / 2.0, PI, 2.5] {
            let s = theta_space(theta, 64);
            let v = VectorField::parse(&m, &["1"], None).unwrap();
            let u = rep_transport(&s, &v, 2.0 * PI, 256).unwrap();
            let expect = kron_identity(&LinOp::identity(64), 1).scale(Complex64::from_polar(1.0, -theta));
            assert!(spectral_norm(&u.sub(&expect).unwrap()) < 1e-6);
        }
    }

    #[test]
    fn out_and_back_along_different_fields_is_the_identity() {
        let m = circle();
        let s = theta_space(1.0, 128);
        let v = VectorField::parse(&m, &["1"], None).unwrap();
        // out past the edge along v, back along a faster field
        let w = VectorField::parse(&m, &["2"], None).unwrap();
        let g = FlowWord::new(vec![FlowMap::new(&v, 4.0, 256).unwrap(), FlowMap::new(&w, -2.0, 256).unwrap()]);
        let u = transport::transport_op(&s, &g).unwrap();
        assert!(spectral_norm(&u.sub(&LinOp::identity(128)).unwrap()) < 1e-5);
    }

    #[test]
    fn cocycle_with_wraps() {
        let m = circle();
        let s = theta_space(PI / 3.0, 64);
        let v = VectorField::parse(&m, &["1"], None).unwrap();
        let g = FlowWord::single(FlowMap::new(&v, 4.0, 256).unwrap());
        let h = FlowWord::single(FlowMap::new(&v, 3.5, 256).unwrap());
        let pts: Vec<Vec<f64>> = (0..20).map(|i| vec![0.1 + 0.3 * i as f64]).collect();
        let rep = check_cocycle(&s, &g, &h, &pts).unwrap();
        assert!(rep.residual <= 1e-12, "{}", rep.residual);
        // x = 1: h x = 4.5, g h x = 8.5 wraps once, so V_gh = e^{-iθ}
        let x = vec![1.0];
        let vgh = transport::cocycle_value(&s, &g.after(&h), &x).unwrap();
        assert!((vgh[(0, 0)] - Complex64::from_polar(1.0, -PI / 3.0)).norm() < 1e-14);
    }

    #[test]
    fn interior_box_does_not_see_the_twist() {
        let s = theta_space(2.0, 128);
        let b = SubBox::new(vec![1.5], vec![4.5]).unwrap();
        assert!(compare_locally(&s, &b).unwrap().max() <= 1e-12);
        let edge = SubBox::new(vec![0.01], vec![3.0]).unwrap();
        assert!(matches!(compare_locally(&s, &edge), Err(Error::BoxTouchesEdge(_))));
    }

    #[test]
    fn klein_interior_box_with_two_dimensional_fiber() {
        let m = make_manifold(ManifoldSpec::KleinBottle { lengths: [1.0, 1.0] }).unwrap();
        let s = build_space(&m, klein_irrep(PI / 3.0), &[24, 24]).unwrap();
        let b = SubBox::new(vec![0.3, 0.3], vec![0.7, 0.7]).unwrap();
        assert!(compare_locally(&s, &b).unwrap().max() <= 1e-12);
    }

    #[test]
    fn equivalence_verdicts() {
        let a = theta_space(0.4, 64);
        let b = theta_space(0.4 + 2.0 * PI, 64);
        let c = theta_space(0.4 + PI, 64);
        let classes = vec![HomotopyClass { exponents: vec![1] }, HomotopyClass { exponents: vec![2] }];
        assert_eq!(check_equivalence(&a, &b, &classes).unwrap().verdict, Verdict::Equivalent);
        assert_eq!(check_equivalence(&a, &c, &classes).unwrap().verdict, Verdict::Distinct);
        let m = make_manifold(ManifoldSpec::KleinBottle { lengths: [1.0, 1.0] }).unwrap();
        let r = klein_irrep(PI / 3.0);
        let x = 0.3f64;
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(x.cos(), 0.0), Complex64::new(0.0, x.sin()), Complex64::new(0.0, x.sin()), Complex64::new(x.cos(), 0.0)],
        );
        let s1 = build_space(&m, r.clone(), &[12, 12]).unwrap();
        let s2 = s1.with_rep(r.conjugated(&u).unwrap()).unwrap();
        let kc = |a: i64, b: i64| HomotopyClass { exponents: vec![a, b] };
        let classes = vec![kc(1, 0), kc(0, 1), kc(1, 1), kc(2, 0)];
        assert_eq!(check_equivalence(&s1, &s2, &classes).unwrap().verdict, Verdict::Equivalent);
        let one = s1.with_rep(Pi1Representation::trivial(Pi1Presentation::klein_bottle(), 1)).unwrap();
        assert!(matches!(check_equivalence(&s1, &one, &classes), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn exponential_and_transport_agree_within_their_bound() {
        let m = circle();
        let s = theta_space(1.3, 256);
        let v = VectorField::parse(&m, &["1 + 0.3*sin(x)"], None).unwrap();
        let states = twisted_waves(&s, 20, 3, 7).unwrap();
        let a = compare_unitaries(&s, &v, 0.3, Order::Four, &states, 4.0).unwrap();
        assert!(a.difference <= a.bound.max(1e-6), "{a:?}");
    }
}
