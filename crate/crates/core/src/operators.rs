//! The Schroedinger representation on a grid: multiplication operators,
//! momenta `T_v`, resolvents and flow unitaries, and residual checks of the
//! relations between them.
//!
//! `T_v = -(i/2) Σ_j (V_j D_j + D_j V_j)` with `V_j` the diagonal of samples
//! of `v_j` and `D_j` the antisymmetric central difference. The symmetrized
//! product is exactly hermitian and agrees with `-i (v·∇ + ½ div v)` to the
//! order of the stencil. `U(λv) = exp(-iλ T_v)`, which translates states by
//! `+λ` for `v = ∂x`.

use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{lie_bracket, ScalarField, VectorField};
use crate::flows::{pushforward_field, sample_field, FieldSamples, FlowWord};
use crate::linalg::norms::{matrix_norm2, spectral_norm, NormKind};
use crate::linalg::{CMatrix, LinOp, OpFlag, I};
use crate::manifold::{make_grid, Grid, Manifold};
use crate::probes;
use crate::representations::RepSpace;
use crate::stencil::{difference_blocks, Order, Stencil};
use crate::transport::transport_op;

/// Largest dimension for which dense functions of an operator are formed.
pub const DENSE_FUNCTION_CAP: usize = 4096;
/// Digits the resolvent solve may lose before it is rejected.
pub const RESOLVENT_MAX_CONDITION: f64 = 1e6;

fn check_manifold(grid: &Grid, m: &Manifold) -> Result<()> {
    if grid.manifold().spec() != m.spec() {
        return Err(Error::InvalidParam(format!("field on {} used on a grid of {}", m.spec(), grid.manifold().spec())));
    }
    Ok(())
}

/// Multiplication by `f`, blockwise scalar on the fiber.
pub fn mult_on(s: &RepSpace, f: &ScalarField) -> Result<LinOp> {
    check_manifold(s.grid(), f.manifold())?;
    diag_on(s, &f.samples(s.grid())?)
}

fn diag_on(s: &RepSpace, samples: &[f64]) -> Result<LinOp> {
    let k = s.fiber_dim();
    let d: Vec<Complex64> =
        samples.iter().flat_map(|&v| std::iter::repeat_n(Complex64::new(v, 0.0), k)).collect();
    Ok(LinOp::diagonal(&d).with_flag(OpFlag::Hermitian))
}

pub fn momentum_on(s: &RepSpace, v: &VectorField, order: Order) -> Result<LinOp> {
    check_manifold(s.grid(), v.manifold())?;
    if !v.is_zero() {
        v.check_margin(s.grid())?;
    }
    Ok(momentum_from_samples(s, &sample_field(v, s.grid())?, order))
}

/// `T_v` from nodal samples of `v`, e.g. of a pushed-forward field.
pub fn momentum_from_samples(s: &RepSpace, v: &FieldSamples, order: Order) -> LinOp {
    let k = s.fiber_dim();
    let stencil = Stencil::central(order);
    let half = Complex64::new(0.0, -0.5);
    let mut t = Vec::new();
    for (axis, vj) in v.iter().enumerate() {
        if vj.iter().all(|c| *c == 0.0) {
            continue;
        }
        for (r, c, val) in difference_blocks(s, axis, &stencil) {
            let sum = vj[r / k] + vj[c / k];
            if sum != 0.0 {
                t.push((r, c, half * sum * val));
            }
        }
    }
    LinOp::from_triplets(s.dim(), &t, OpFlag::Hermitian)
}

pub fn mult_op(grid: &Grid, f: &ScalarField) -> Result<LinOp> {
    mult_on(&RepSpace::untwisted(grid.clone()), f)
}

pub fn momentum_op(grid: &Grid, v: &VectorField) -> Result<LinOp> {
    momentum_op_with_order(grid, v, Order::Two)
}

pub fn momentum_op_with_order(grid: &Grid, v: &VectorField, order: Order) -> Result<LinOp> {
    momentum_on(&RepSpace::untwisted(grid.clone()), v, order)
}

fn require_hermitian(t: &LinOp) -> Result<()> {
    if t.flag() != OpFlag::Hermitian {
        return Err(Error::InvalidParam("operator is not flagged hermitian".into()));
    }
    Ok(())
}

fn cap(t: &LinOp) -> Result<()> {
    if t.dim() > DENSE_FUNCTION_CAP {
        return Err(Error::SizeExceeded { size: t.dim(), cap: DENSE_FUNCTION_CAP });
    }
    Ok(())
}

/// `(T - i)⁻¹` by an LU solve.
pub fn resolvent(t: &LinOp) -> Result<LinOp> {
    require_hermitian(t)?;
    cap(t)?;
    let n = t.dim();
    let a = t.to_dense() - CMatrix::identity(n, n) * I;
    let lu = a.clone().lu();
    let x = lu.solve(&CMatrix::identity(n, n)).ok_or_else(|| Error::SolveFailed("singular matrix".into()))?;
    let norm1 = |m: &CMatrix| (0..m.ncols()).map(|c| m.column(c).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let cond = norm1(&a) * norm1(&x);
    if !cond.is_finite() || cond > RESOLVENT_MAX_CONDITION {
        return Err(Error::SolveFailed(format!("condition estimate {cond:.3e}")));
    }
    Ok(LinOp::dense(x, OpFlag::General))
}

/// Eigendecomposition of a hermitian operator, for forming functions of it.
#[derive(Debug, Clone)]
pub struct SpectralCalculus {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl SpectralCalculus {
    pub fn new(t: &LinOp) -> Result<Self> {
        require_hermitian(t)?;
        cap(t)?;
        let eig = SymmetricEigen::new(t.to_dense());
        Ok(SpectralCalculus { values: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &e) in self.values.iter().enumerate() {
            let c = f(e);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= c;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn exp(&self, lambda: f64) -> LinOp {
        LinOp::dense(self.apply(|e| Complex64::from_polar(1.0, -lambda * e)), OpFlag::Unitary)
    }
}

/// `exp(-iλT)` through the eigendecomposition of `T`.
pub fn unitary(t: &LinOp, lambda: f64) -> Result<LinOp> {
    if lambda == 0.0 {
        return Ok(LinOp::identity(t.dim()).with_flag(OpFlag::Unitary));
    }
    Ok(SpectralCalculus::new(t)?.exp(lambda))
}

/// One row of a residual study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub resolution: Vec<usize>,
    pub residual: f64,
    pub norm_kind: NormKind,
}

impl ResidualReport {
    pub fn new(check: &str, params: BTreeMap<String, Value>, grid: &Grid, residual: f64, norm_kind: NormKind) -> Self {
        ResidualReport { check: check.into(), params, resolution: grid.n().to_vec(), residual, norm_kind }
    }
}

/// `coarse / fine` residual ratio of a refinement pair.
pub fn convergence_ratio(coarse: &ResidualReport, fine: &ResidualReport) -> f64 {
    coarse.residual / fine.residual
}

pub fn doubled(grid: &Grid) -> Result<Grid> {
    let n: Vec<usize> = grid.n().iter().map(|n| 2 * n).collect();
    make_grid(grid.manifold(), &n)
}

fn relative(num: f64, den: f64, params: &mut BTreeMap<String, Value>) -> f64 {
    params.insert("absolute".into(), json!(num));
    if den > 0.0 {
        params.insert("relative".into(), json!(true));
        num / den
    } else {
        params.insert("relative".into(), json!(false));
        num
    }
}

/// `‖T_{fv} - ½(M_f T_v + T_v M_f)‖ / ‖T_{fv}‖` in the spectral norm; absolute
/// if `T_{fv}` vanishes.
pub fn lr_residual(grid: &Grid, f: &ScalarField, v: &VectorField) -> Result<ResidualReport> {
    let tv = momentum_op(grid, v)?;
    let tfv = momentum_op(grid, &v.scaled(f))?;
    let mf = mult_op(grid, f)?;
    let anti = mf.compose(&tv)?.add(&tv.compose(&mf)?)?.scale(Complex64::new(0.5, 0.0));
    let diff = tfv.sub(&anti)?;
    let mut params = BTreeMap::new();
    let r = relative(spectral_norm(&diff), spectral_norm(&tfv), &mut params);
    Ok(ResidualReport::new("lr-relation", params, grid, r, NormKind::Spectral))
}

/// The residual at `grid` and at doubled resolution.
pub fn check_lr_relation(grid: &Grid, f: &ScalarField, v: &VectorField) -> Result<Vec<ResidualReport>> {
    Ok(vec![lr_residual(grid, f, v)?, lr_residual(&doubled(grid)?, f, v)?])
}

pub const RESOLVENT_LIMIT_LAMBDAS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// `R - R† - 2iRR†`, `R† + R_{-v}`, and `[i(U(λ)-1)/λ - i]R² - R` for the
/// standard values of `λ`, in the spectral norm.
pub fn check_resolvent_identities(grid: &Grid, v: &VectorField) -> Result<Vec<ResidualReport>> {
    let t = momentum_op(grid, v)?;
    let r = resolvent(&t)?;
    let rd = r.to_dense();
    let rh = rd.adjoint();
    let dense = |m: CMatrix| LinOp::dense(m, OpFlag::General);
    let adj = &rd - &rh - &rd * &rh * (I * 2.0);
    let r_neg = resolvent(&momentum_op(grid, &v.times(-1.0))?)?.to_dense();
    let refl = &rh + r_neg;
    let mut out = vec![
        ResidualReport::new("resolvent-adjoint", BTreeMap::new(), grid, spectral_norm(&dense(adj)), NormKind::Spectral),
        ResidualReport::new("resolvent-reflection", BTreeMap::new(), grid, spectral_norm(&dense(refl)), NormKind::Spectral),
    ];
    let calc = SpectralCalculus::new(&t)?;
    let r2 = &rd * &rd;
    let n = t.dim();
    for &lambda in &RESOLVENT_LIMIT_LAMBDAS {
        let u = calc.exp(lambda).to_dense();
        let gen = (u - CMatrix::identity(n, n)) * (I / lambda) - CMatrix::identity(n, n) * I;
        let res = gen * &r2 - &rd;
        let mut params = BTreeMap::new();
        params.insert("lambda".into(), json!(lambda));
        out.push(ResidualReport::new("resolvent-limit", params, grid, spectral_norm(&dense(res)), NormKind::Spectral));
    }
    Ok(out)
}

/// `‖U M_f U⁻¹ - M_{f∘g⁻¹}‖` and `‖U R_w U⁻¹ - R_{g∗w}‖` on probe states,
/// with `U` the transport unitary of `g`.
pub fn covariance_residuals(grid: &Grid, g: &FlowWord, f: &ScalarField, w: &VectorField) -> Result<Vec<ResidualReport>> {
    let s = RepSpace::untwisted(grid.clone());
    let q = probes::probe_states(&s, &probes::default_region(&s));
    let u = transport_op(&s, g)?;
    let uinv = transport_op(&s, &g.inverse())?;
    let conj = |a: &LinOp| u.apply(&a.apply(&uinv.apply(&q)));
    let mf = mult_op(grid, f)?;
    let fg = f.compose_samples(grid, |x| g.backward(x))?;
    let mfg = diag_on(&s, &fg)?;
    let func = matrix_norm2(&(conj(&mf) - mfg.apply(&q)));
    let rw = resolvent(&momentum_op(grid, w)?)?;
    let gw = pushforward_field(g, w, grid)?;
    let rgw = resolvent(&momentum_from_samples(&s, &gw, Order::Two))?;
    let res = matrix_norm2(&(conj(&rw) - rgw.apply(&q)));
    Ok(vec![
        ResidualReport::new("function-covariance", BTreeMap::new(), grid, func, NormKind::Probe),
        ResidualReport::new("resolvent-covariance", BTreeMap::new(), grid, res, NormKind::Probe),
    ])
}

/// Both covariance residuals at `grid` and at doubled resolution.
pub fn check_covariance(grid: &Grid, g: &FlowWord, f: &ScalarField, w: &VectorField) -> Result<Vec<ResidualReport>> {
    let mut out = covariance_residuals(grid, g, f, w)?;
    out.extend(covariance_residuals(&doubled(grid)?, g, f, w)?);
    Ok(out)
}

/// `‖([T_v, T_w] + i T_{[v,w]}) Q‖ / ‖[T_v, T_w] Q‖` on probe states;
/// absolute when the commutator vanishes.
pub fn lie_residual(grid: &Grid, v: &VectorField, w: &VectorField) -> Result<ResidualReport> {
    let s = RepSpace::untwisted(grid.clone());
    let q = probes::probe_states(&s, &probes::default_region(&s));
    let tv = momentum_op(grid, v)?;
    let tw = momentum_op(grid, w)?;
    let tb = momentum_op(grid, &lie_bracket(v, w)?)?;
    let comm = tv.commutator(&tw)?;
    let diff = comm.add_scaled(&tb, I)?;
    let mut params = BTreeMap::new();
    let r = relative(matrix_norm2(&diff.apply(&q)), matrix_norm2(&comm.apply(&q)), &mut params);
    Ok(ResidualReport::new("lie-relation", params, grid, r, NormKind::Probe))
}

pub fn check_lie_relations(grid: &Grid, v: &VectorField, w: &VectorField) -> Result<Vec<ResidualReport>> {
    Ok(vec![lie_residual(grid, v, w)?, lie_residual(&doubled(grid)?, v, w)?])
}

/// `‖(U₁U₂ - U₂U₁) M_α‖` for two transport unitaries, on probe states.
pub fn local_commutation(grid: &Grid, g1: &FlowWord, g2: &FlowWord, alpha: &ScalarField) -> Result<ResidualReport> {
    let s = RepSpace::untwisted(grid.clone());
    let q = probes::probe_states(&s, &probes::default_region(&s));
    let u1 = transport_op(&s, g1)?;
    let u2 = transport_op(&s, g2)?;
    let ma = mult_op(grid, alpha)?.apply(&q);
    let diff = u1.apply(&u2.apply(&ma)) - u2.apply(&u1.apply(&ma));
    Ok(ResidualReport::new("local-commutation", BTreeMap::new(), grid, matrix_norm2(&diff), NormKind::Probe))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::FlowMap;
    use crate::linalg::eigen::dense_eigenvalues;
    use crate::manifold::{make_manifold, ManifoldSpec, SubBox};
    use std::f64::consts::PI;

    fn circle_grid(n: usize) -> Grid {
        make_grid(&make_manifold(ManifoldSpec::Circle { length: 2.0 * PI }).unwrap(), &[n]).unwrap()
    }

    #[test]
    fn multiplication_examples() {
        let g = circle_grid(8);
        let m = g.manifold().clone();
        let z = mult_op(&g, &ScalarField::constant(&m, 0.0)).unwrap();
        assert_eq!(z.frobenius(), 0.0);
        let s = mult_op(&g, &ScalarField::parse(&m, "sin(x)", None).unwrap()).unwrap();
        assert!((s.entry(1, 1).re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s.entry(2, 2).re - 1.0).abs() < 1e-15);
        assert!((spectral_norm(&s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn momentum_of_unit_field_has_integer_spectrum() {
        let err = |n: usize| {
            let g = circle_grid(n);
            let v = VectorField::parse(g.manifold(), &["1"], None).unwrap();
            let ev = dense_eigenvalues(&momentum_op(&g, &v).unwrap().to_dense());
            (-3i32..=3)
                .map(|k| ev.iter().map(|e| (e - k as f64).abs()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        let (a, b) = (err(128), err(256));
        assert!(b < 3e-3);
        assert!((3.5..=4.5).contains(&(a / b)), "{a} {b}");
    }

    #[test]
    fn momentum_is_hermitian_on_the_line() {
        let m = make_manifold(ManifoldSpec::Line { half_width: 10.0 }).unwrap();
        let g = make_grid(&m, &[256]).unwrap();
        let b = SubBox::new(vec![-3.0], vec![3.0]).unwrap();
        let v = VectorField::parse(&m, &["x*bump(x/3)"], Some(b)).unwrap();
        assert!(momentum_op(&g, &v).unwrap().hermiticity_residual() <= 1e-12);
        assert_eq!(momentum_op(&g, &VectorField::zero(&m)).unwrap().frobenius(), 0.0);
        let wide = SubBox::new(vec![-9.99], vec![9.99]).unwrap();
        let near = VectorField::parse(&m, &["bump(x/9.99)"], Some(wide)).unwrap();
        assert!(matches!(momentum_op(&g, &near), Err(Error::SupportViolation(_))));
    }

    #[test]
    fn resolvent_examples() {
        let z = resolvent(&LinOp::zeros(3).with_flag(OpFlag::Hermitian)).unwrap();
        assert!((z.entry(0, 0) - I).norm() < 1e-15);
        let one = resolvent(&LinOp::identity(1).with_flag(OpFlag::Hermitian)).unwrap();
        assert!((one.entry(0, 0) - Complex64::new(0.5, 0.5)).norm() < 1e-15);
        let g = circle_grid(64);
        let v = VectorField::parse(g.manifold(), &["1"], None).unwrap();
        let r = resolvent(&momentum_op(&g, &v).unwrap()).unwrap();
        assert!((spectral_norm(&r) - 1.0).abs() < 1e-10);
        assert!(resolvent(&LinOp::identity(2)).is_err());
    }

    #[test]
    fn unitary_translates_forward() {
        let g = circle_grid(128);
        let m = g.manifold().clone();
        let v = VectorField::parse(&m, &["1"], None).unwrap();
        let t = momentum_op(&g, &v).unwrap();
        assert_eq!(unitary(&t, 0.0).unwrap(), LinOp::identity(128).with_flag(OpFlag::Unitary));
        let u = unitary(&t, 0.5).unwrap();
        assert!(u.unitarity_residual() <= 1e-10);
        // a smooth state moves by +0.5
        let psi: Vec<Complex64> = g.points().iter().map(|x| Complex64::new((x[0]).sin(), 0.0)).collect();
        let out = u.apply_vec(&nalgebra::DVector::from_vec(psi));
        for (p, x) in g.points().iter().enumerate() {
            assert!((out[p].re - (x[0] - 0.5).sin()).abs() < 1e-3);
        }
        // a full period returns resolved states to themselves
        let full = unitary(&t, 2.0 * PI).unwrap();
        let back = full.apply_vec(&nalgebra::DVector::from_fn(128, |p, _| Complex64::new(g.point(p)[0].cos(), 0.0)));
        for p in 0..128 {
            assert!((back[p].re - g.point(p)[0].cos()).abs() < 5e-3);
        }
    }

    #[test]
    fn lr_relation_examples() {
        let g = circle_grid(128);
        let m = g.manifold().clone();
        let v = VectorField::parse(&m, &["cos(x)"], None).unwrap();
        let c = ScalarField::constant(&m, 2.5);
        assert!(lr_residual(&g, &c, &v).unwrap().residual <= 1e-12);
        let f = ScalarField::parse(&m, "sin(x)", None).unwrap();
        let r = check_lr_relation(&circle_grid(256), &f, &v).unwrap();
        let ratio = convergence_ratio(&r[0], &r[1]);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        let fb = ScalarField::parse(&m, "bump((x-1.5)/0.8)", None).unwrap();
        let vb = VectorField::parse(&m, &["bump((x-4.5)/0.8)"], None).unwrap();
        let d = lr_residual(&g, &fb, &vb).unwrap();
        assert_eq!(d.params["relative"], json!(false));
        assert!(d.residual <= 1e-10);
    }

    #[test]
    fn resolvent_identities_hold() {
        let g = circle_grid(64);
        let v = VectorField::parse(g.manifold(), &["1 + 0.5*sin(x)"], None).unwrap();
        let r = check_resolvent_identities(&g, &v).unwrap();
        assert!(r[0].residual <= 1e-10 && r[1].residual <= 1e-10);
        let ratio1 = r[2].residual / r[3].residual;
        let ratio2 = r[3].residual / r[4].residual;
        assert!((8.0..=12.0).contains(&ratio1) && (8.0..=12.0).contains(&ratio2), "{ratio1} {ratio2}");
        let z = check_resolvent_identities(&g, &VectorField::zero(g.manifold())).unwrap();
        assert!(z.iter().all(|r| r.residual <= 1e-14));
    }

    #[test]
    fn exact_shift_covariance() {
        let g = circle_grid(64);
        let m = g.manifold().clone();
        let v = VectorField::parse(&m, &["1"], None).unwrap();
        let step = FlowWord::single(FlowMap::new(&v, g.h()[0], 64).unwrap());
        let f = ScalarField::parse(&m, "sin(x) + 0.3*cos(3*x)", None).unwrap();
        let w = VectorField::parse(&m, &["1 + 0.5*cos(x)"], None).unwrap();
        let r = covariance_residuals(&g, &step, &f, &w).unwrap();
        assert!(r[0].residual <= 1e-9, "{}", r[0].residual);
        let id = FlowWord::single(FlowMap::new(&v, 0.0, 64).unwrap());
        let r = covariance_residuals(&g, &id, &f, &w).unwrap();
        assert!(r.iter().all(|r| r.residual <= 1e-10));
    }

    #[test]
    fn lie_relation_examples() {
        let g = circle_grid(128);
        let m = g.manifold().clone();
        let v = VectorField::parse(&m, &["sin(x)"], None).unwrap();
        assert!(lie_residual(&g, &v, &v).unwrap().residual <= 1e-12);
        let a = VectorField::parse(&m, &["bump((x-1.5)/0.8)"], None).unwrap();
        let b = VectorField::parse(&m, &["bump((x-4.5)/0.8)"], None).unwrap();
        assert!(lie_residual(&g, &a, &b).unwrap().residual <= 1e-10);
        let w = VectorField::parse(&m, &["cos(x)"], None).unwrap();
        let r = check_lie_relations(&circle_grid(256), &v, &w).unwrap();
        let ratio = convergence_ratio(&r[0], &r[1]);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }
}
