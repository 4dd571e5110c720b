//! One-parameter diffeomorphism groups generated by vector fields.
//!
//! Integration runs in cover coordinates with classical fixed-step RK4, so
//! the sheet reached by a trajectory is read off directly from the endpoint.
//! The half-density factor `J(g, x) = [det D(g^-1)(x)]^(1/2)` is obtained by
//! integrating the divergence along the backward orbit in the same sweep.

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::homotopy::HomotopyClass;
use crate::manifold::{Grid, Manifold};

pub const MIN_STEPS: usize = 16;
/// Periodic axes may be unrolled this many periods before a trajectory is
/// declared divergent.
const COVER_PERIODS: f64 = 1000.0;

/// Per-axis samples of a vector field on a grid: `samples[axis][node]`.
pub type FieldSamples = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowMap {
    field: VectorField,
    lambda: f64,
    steps: usize,
}

/// Endpoint of a flow, on the cover and reduced.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPoint {
    pub cover: Vec<f64>,
    pub point: Vec<f64>,
    /// Class of the traversed path: sheet of the start to sheet of the end.
    pub class: HomotopyClass,
}

impl FlowMap {
    pub fn new(field: &VectorField, lambda: f64, steps: usize) -> Result<Self> {
        if steps < MIN_STEPS {
            return Err(Error::InvalidParam(format!("flow needs at least {MIN_STEPS} steps, got {steps}")));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidParam(format!("flow parameter {lambda} is not finite")));
        }
        Ok(FlowMap { field: field.clone(), lambda, steps })
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn manifold(&self) -> &Manifold {
        self.field.manifold()
    }

    /// `g(λv) x` in cover coordinates.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(integrate(&self.field, self.lambda, x, self.steps)?.0)
    }

    /// `g(-λv) x` in cover coordinates.
    pub fn backward(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(integrate(&self.field, -self.lambda, x, self.steps)?.0)
    }

    /// `g(-λv) x` together with `log det D(g^-1)(x)`.
    pub fn backward_with_log_det(&self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        integrate(&self.field, -self.lambda, x, self.steps)
    }

    pub fn jacobian(&self, x: &[f64]) -> Result<f64> {
        Ok((0.5 * self.backward_with_log_det(x)?.1).exp())
    }

    pub fn inverse(&self) -> FlowMap {
        FlowMap { field: self.field.clone(), lambda: -self.lambda, steps: self.steps }
    }
}

/// Composite diffeomorphism `g = g_n ∘ ... ∘ g_1`; `parts[0]` acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowWord {
    pub parts: Vec<FlowMap>,
}

impl FlowWord {
    pub fn new(parts: Vec<FlowMap>) -> Self {
        FlowWord { parts }
    }

    pub fn single(g: FlowMap) -> Self {
        FlowWord { parts: vec![g] }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.parts.iter().try_fold(x.to_vec(), |y, g| g.forward(&y))
    }

    pub fn backward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.parts.iter().rev().try_fold(x.to_vec(), |y, g| g.backward(&y))
    }

    /// `g^-1 x` and `log det D(g^-1)(x)`; log-determinants add along the chain.
    pub fn backward_with_log_det(&self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        self.parts.iter().rev().try_fold((x.to_vec(), 0.0), |(y, acc), g| {
            let (z, l) = g.backward_with_log_det(&y)?;
            Ok((z, acc + l))
        })
    }

    pub fn inverse(&self) -> FlowWord {
        FlowWord { parts: self.parts.iter().rev().map(FlowMap::inverse).collect() }
    }

    /// `g ∘ h` as a word (`h` acts first).
    pub fn after(&self, h: &FlowWord) -> FlowWord {
        FlowWord { parts: h.parts.iter().chain(&self.parts).cloned().collect() }
    }
}

/// RK4 for `dx/ds = v(x)` over parameter `lambda`, returning the endpoint and
/// `∫ div v ds` signed by the direction of travel.
fn integrate(v: &VectorField, lambda: f64, x0: &[f64], steps: usize) -> Result<(Vec<f64>, f64)> {
    if lambda == 0.0 || v.is_zero() || v.outside_support(x0) {
        return Ok((x0.to_vec(), 0.0));
    }
    let m = v.manifold();
    let d = x0.len();
    let dt = lambda / steps as f64;
    // augmented state (x, l) with l' = sign * div v
    let rhs = |y: &[f64]| -> Result<Vec<f64>> {
        let mut out = v.eval_cover(&y[..d])?;
        out.push(v.divergence_cover(&y[..d])?);
        Ok(out)
    };
    let mut y: Vec<f64> = x0.iter().copied().chain(std::iter::once(0.0)).collect();
    let axpy = |y: &[f64], k: &[f64], a: f64| -> Vec<f64> { y.iter().zip(k).map(|(u, w)| u + a * w).collect() };
    for step in 0..steps {
        let k1 = rhs(&y)?;
        let k2 = rhs(&axpy(&y, &k1, 0.5 * dt))?;
        let k3 = rhs(&axpy(&y, &k2, 0.5 * dt))?;
        let k4 = rhs(&axpy(&y, &k3, dt))?;
        for i in 0..=d {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let inside = (0..d).all(|a| {
            let (lo, hi) = (m.lo()[a], m.hi()[a]);
            let ok = if m.is_periodic(a) {
                let span = COVER_PERIODS * m.length(a);
                y[a] > lo - span && y[a] < hi + span
            } else {
                y[a] >= lo && y[a] < hi
            };
            ok && y[a].is_finite()
        });
        if !inside {
            return Err(Error::IntegrationDiverged { at: (step + 1) as f64 * dt });
        }
    }
    let l = y.pop().unwrap_or(0.0);
    // the divergence integral is accumulated against ds with ds = dt, which
    // already carries the sign of lambda
    Ok((y, l))
}

/// `g(λv) x` with the crossing class of the traversed integral curve.
pub fn flow(v: &VectorField, lambda: f64, x: &[f64], steps: usize) -> Result<FlowPoint> {
    let g = FlowMap::new(v, lambda, steps)?;
    let cover = g.forward(x)?;
    let m = v.manifold();
    let (start, _) = m.reduce_point(x);
    let (end, point) = m.reduce_point(&cover);
    let p = m.presentation();
    Ok(FlowPoint { cover, point, class: p.compose(&p.inverse(&start), &end) })
}

/// `J(g(λv), x) = exp(-½ ∫_0^λ div v(g(-sv) x) ds)`.
pub fn jacobian_factor(v: &VectorField, lambda: f64, x: &[f64], steps: usize) -> Result<f64> {
    FlowMap::new(v, lambda, steps)?.jacobian(x)
}

/// Samples of `g_* w (x) = Dg(g^-1 x) w(g^-1 x)` on the grid, with `Dg` from
/// central differences of the forward map at step `h/4` per axis.
pub fn pushforward_field(g: &FlowWord, w: &VectorField, grid: &Grid) -> Result<FieldSamples> {
    pushforward_field_with_step(g, w, grid, 0.25)
}

pub fn pushforward_field_with_step(g: &FlowWord, w: &VectorField, grid: &Grid, step_frac: f64) -> Result<FieldSamples> {
    let d = grid.dim();
    let mut out = vec![vec![0.0; grid.len()]; d];
    for k in 0..grid.len() {
        let x = grid.point(k);
        let y = g.backward(&x)?;
        let wy = w.eval_cover(&y)?;
        if wy.iter().all(|c| *c == 0.0) {
            continue;
        }
        for (j, &wj) in wy.iter().enumerate() {
            if wj == 0.0 {
                continue;
            }
            let delta = step_frac * grid.h()[j];
            let mut yp = y.clone();
            let mut ym = y.clone();
            yp[j] += delta;
            ym[j] -= delta;
            let (gp, gm) = (g.forward(&yp)?, g.forward(&ym)?);
            for i in 0..d {
                out[i][k] += (gp[i] - gm[i]) / (2.0 * delta) * wj;
            }
        }
    }
    Ok(out)
}

/// Samples of a symbolic field on the grid nodes.
pub fn sample_field(v: &VectorField, grid: &Grid) -> Result<FieldSamples> {
    let d = grid.dim();
    let mut out = vec![vec![0.0; grid.len()]; d];
    for k in 0..grid.len() {
        let val = v.eval(&grid.point(k))?;
        for a in 0..d {
            out[a][k] = val[a];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{make_grid, make_manifold, ManifoldSpec, SubBox};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn circle() -> Manifold {
        make_manifold(ManifoldSpec::Circle { length: 2.0 * PI }).unwrap()
    }

    fn line() -> Manifold {
        make_manifold(ManifoldSpec::Line { half_width: 10.0 }).unwrap()
    }

    fn dilation() -> VectorField {
        let b = SubBox::new(vec![-3.0], vec![3.0]).unwrap();
        VectorField::parse(&line(), &["x*bump(x/3)"], Some(b)).unwrap()
    }

    /// Exact flow of `sin(x) d/dx`: `tan(x/2)` scales by `e^s`.
    fn sin_flow(x: f64, s: f64) -> f64 {
        2.0 * ((x / 2.0).tan() * s.exp()).atan()
    }

    #[test]
    fn flow_examples() {
        let c = circle();
        let one = VectorField::parse(&c, &["1"], None).unwrap();
        let r = flow(&one, PI, &[0.0], 16).unwrap();
        assert!((r.point[0] - PI).abs() < 1e-14);
        let b = SubBox::new(vec![1.0], vec![2.0]).unwrap();
        let v = VectorField::parse(&c, &["bump(2*x - 3)"], Some(b)).unwrap();
        assert_eq!(flow(&v, 3.0, &[0.5], 64).unwrap().cover, vec![0.5]);
        let s = VectorField::parse(&c, &["sin(x)"], None).unwrap();
        let reference = flow(&s, 1.0, &[PI / 2.0], 1 << 14).unwrap().point[0];
        assert!((reference - sin_flow(PI / 2.0, 1.0)).abs() < 1e-13);
        let e16 = (flow(&s, 1.0, &[PI / 2.0], 16).unwrap().point[0] - reference).abs();
        let e32 = (flow(&s, 1.0, &[PI / 2.0], 32).unwrap().point[0] - reference).abs();
        assert!(e16 / e32 > 12.0 && e16 / e32 < 20.0, "ratio {}", e16 / e32);
        assert!(matches!(flow(&s, 1.0, &[0.3], 8), Err(Error::InvalidParam(_))));
    }

    #[test]
    fn wrapping_flow_records_the_class() {
        let one = VectorField::parse(&circle(), &["1"], None).unwrap();
        let r = flow(&one, 2.0 * PI + 1.0, &[0.5], 64).unwrap();
        assert_eq!(r.class.exponents, vec![1]);
        assert!((r.point[0] - 1.5).abs() < 1e-12);
        let back = flow(&one, -1.0, &[0.5], 64).unwrap();
        assert_eq!(back.class.exponents, vec![-1]);
    }

    #[test]
    fn trajectories_stay_in_the_support() {
        let b = SubBox::new(vec![-9.0], vec![9.0]).unwrap();
        let v = VectorField::parse(&line(), &["x^3 * bump(x/9)"], Some(b)).unwrap();
        let r = flow(&v, 50.0, &[1.0], 4096).unwrap();
        assert!(r.cover[0] > 1.0 && r.cover[0] < 9.0);
    }

    #[test]
    fn unrolling_too_far_diverges() {
        let one = VectorField::parse(&circle(), &["1"], None).unwrap();
        assert!(matches!(flow(&one, 2.0e4 * PI, &[0.0], 16), Err(Error::IntegrationDiverged { .. })));
    }

    #[test]
    fn jacobian_examples() {
        let one = VectorField::parse(&circle(), &["1"], None).unwrap();
        assert_eq!(jacobian_factor(&one, 0.7, &[1.0], 32).unwrap(), 1.0);
        let v = dilation();
        assert_eq!(jacobian_factor(&v, 0.0, &[0.3], 32).unwrap(), 1.0);
        let j = jacobian_factor(&v, 0.1, &[0.0], 256).unwrap();
        assert!((j - (-0.05f64).exp()).abs() < 1e-12);
        // finite-difference determinant of the backward map
        let g = FlowMap::new(&v, 0.1, 256).unwrap();
        for &x in &[0.0, 0.7, -1.9] {
            let eps = 1e-4;
            let det = (g.backward(&[x + eps]).unwrap()[0] - g.backward(&[x - eps]).unwrap()[0]) / (2.0 * eps);
            assert!((g.jacobian(&[x]).unwrap() - det.sqrt()).abs() < 1e-6);
        }
    }

    #[test]
    fn pushforward_examples() {
        let c = circle();
        let grid = make_grid(&c, &[32]).unwrap();
        let w = VectorField::parse(&c, &["cos(x) + 2"], None).unwrap();
        let id = FlowWord::single(FlowMap::new(&VectorField::parse(&c, &["sin(x)"], None).unwrap(), 0.0, 16).unwrap());
        let p = pushforward_field(&id, &w, &grid).unwrap();
        let direct = sample_field(&w, &grid).unwrap();
        for k in 0..grid.len() {
            assert!((p[0][k] - direct[0][k]).abs() < 1e-12);
        }
        let one = VectorField::parse(&c, &["1"], None).unwrap();
        let shift = FlowWord::single(FlowMap::new(&one, 0.4, 16).unwrap());
        let p = pushforward_field(&shift, &one, &grid).unwrap();
        assert!(p[0].iter().all(|v| (v - 1.0).abs() < 1e-12));
        // sin flow pushing d/dx: exact answer is the derivative of the flow map
        let s = VectorField::parse(&c, &["sin(x)"], None).unwrap();
        let g = FlowWord::single(FlowMap::new(&s, 0.2, 512).unwrap());
        let p4 = pushforward_field_with_step(&g, &one, &grid, 0.25).unwrap();
        let p8 = pushforward_field_with_step(&g, &one, &grid, 0.125).unwrap();
        let mut worst: f64 = 0.0;
        let (mut d4, mut d8): (f64, f64) = (0.0, 0.0);
        for k in 0..grid.len() {
            let x = grid.point(k)[0];
            let y = sin_flow(x, -0.2);
            // for a 1-d flow the derivative of the map is v(g y) / v(y)
            let exact = if y.sin().abs() < 1e-9 { (0.2 * y.cos()).exp() } else { x.sin() / y.sin() };
            worst = worst.max((p8[0][k] - exact).abs());
            d4 = d4.max((p4[0][k] - exact).abs());
            d8 = d8.max((p8[0][k] - exact).abs());
        }
        assert!(worst < 1e-3);
        assert!(d8 < d4);
    }

    proptest! {
        #[test]
        fn group_law(lam in -1.5f64..1.5, mu in -1.5f64..1.5, x in -2.5f64..2.5) {
            let v = dilation();
            let a = flow(&v, lam, &flow(&v, mu, &[x], 512).unwrap().cover, 512).unwrap().cover[0];
            let b = flow(&v, lam + mu, &[x], 1024).unwrap().cover[0];
            prop_assert!((a - b).abs() < 1e-9);
            let back = FlowMap::new(&v, lam, 512).unwrap();
            let there = back.forward(&[x]).unwrap();
            prop_assert!((back.backward(&there).unwrap()[0] - x).abs() < 1e-9);
        }

        #[test]
        fn jacobian_cocycle(lam in -1.0f64..1.0, mu in -1.0f64..1.0, x in -2.5f64..2.5) {
            let v = dilation();
            let g = FlowMap::new(&v, lam, 512).unwrap();
            let h = FlowMap::new(&v, mu, 512).unwrap();
            let gh = FlowMap::new(&v, lam + mu, 1024).unwrap();
            let lhs = gh.jacobian(&[x]).unwrap();
            let rhs = g.jacobian(&[x]).unwrap() * h.jacobian(&g.backward(&[x]).unwrap()).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-8);
        }

        #[test]
        fn points_outside_support_are_fixed(x in 3.0f64..9.9, lam in -5.0f64..5.0) {
            let v = dilation();
            prop_assert_eq!(flow(&v, lam, &[x], 64).unwrap().cover[0], x);
            prop_assert_eq!(flow(&v, lam, &[-x], 64).unwrap().cover[0], -x);
        }
    }
}
