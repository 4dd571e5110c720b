//! Scalar functions and vector fields given by expressions in the chart.
//!
//! Fields are validated on construction: their support must sit inside the
//! declared box, and on identified axes the values and first derivatives must
//! agree across the gluing (vector components pick up the sign of an
//! orientation-reversing gluing).

pub mod expr;
pub mod parser;

pub use expr::{bump, Expr};
pub use parser::parse;

use crate::error::{Error, Result};
use crate::manifold::{Grid, Manifold, SubBox};

const SUPPORT_TOL: f64 = 1e-14;
const GLUE_TOL: f64 = 1e-12;
const GLUE_DERIV_TOL: f64 = 1e-10;
/// Distance, in grid steps, that supports keep from a truncated end.
pub const MARGIN_STEPS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    expr: Expr,
    gradient: Vec<Expr>,
    manifold: Manifold,
    support: Option<SubBox>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<Expr>,
    /// `jacobian[j][i]` is the derivative of component `j` along axis `i`.
    jacobian: Vec<Vec<Expr>>,
    divergence: Expr,
    manifold: Manifold,
    support: Option<SubBox>,
}

impl ScalarField {
    pub fn new(m: &Manifold, expr: Expr, support: Option<SubBox>) -> Result<Self> {
        let f = Self::unchecked(m, expr, support);
        validate(m, std::slice::from_ref(&f.expr), f.support.as_ref(), false)?;
        Ok(f)
    }

    pub fn parse(m: &Manifold, src: &str, support: Option<SubBox>) -> Result<Self> {
        Self::new(m, parse(src)?, support)
    }

    /// A function without compact support, for confining potentials. Only the
    /// gluing is validated; such a field is never the argument of a flow.
    pub fn potential(m: &Manifold, expr: Expr) -> Result<Self> {
        let f = Self::unchecked(m, expr, None);
        validate_unbounded(m, std::slice::from_ref(&f.expr))?;
        Ok(f)
    }

    pub fn constant(m: &Manifold, c: f64) -> Self {
        Self::unchecked(m, Expr::Num(c), None)
    }

    fn unchecked(m: &Manifold, expr: Expr, support: Option<SubBox>) -> Self {
        let gradient = (0..m.dim()).map(|i| expr.derivative(i)).collect();
        ScalarField { expr, gradient, manifold: m.clone(), support }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn gradient(&self) -> &[Expr] {
        &self.gradient
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn support(&self) -> Option<&SubBox> {
        self.support.as_ref()
    }

    /// Value at a chart point of the fundamental domain.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        self.expr.eval(p)
    }

    /// Value at a point of the universal cover.
    pub fn eval_cover(&self, q: &[f64]) -> Result<f64> {
        let (_, p) = self.manifold.reduce_point(q);
        self.expr.eval(&p)
    }

    pub fn samples(&self, grid: &Grid) -> Result<Vec<f64>> {
        (0..grid.len()).map(|k| self.eval(&grid.point(k))).collect()
    }

    /// Fails if the support comes closer than the margin to a truncated end.
    pub fn check_margin(&self, grid: &Grid) -> Result<()> {
        check_margin(grid, self.support.as_ref())
    }

    /// `f ∘ g^{-1}` sampled on the grid, where `pullback(x)` is `g^{-1} x`
    /// in cover coordinates.
    pub fn compose_samples(&self, grid: &Grid, pullback: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
        (0..grid.len()).map(|k| self.eval_cover(&pullback(&grid.point(k))?)).collect()
    }
}

impl VectorField {
    pub fn new(m: &Manifold, components: Vec<Expr>, support: Option<SubBox>) -> Result<Self> {
        if components.len() != m.dim() {
            return Err(Error::InvalidParam(format!(
                "vector field needs {} components, got {}",
                m.dim(),
                components.len()
            )));
        }
        let v = Self::unchecked(m, components, support);
        validate(m, &v.components, v.support.as_ref(), true)?;
        Ok(v)
    }

    pub fn parse(m: &Manifold, srcs: &[&str], support: Option<SubBox>) -> Result<Self> {
        let comps = srcs.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
        Self::new(m, comps, support)
    }

    pub fn zero(m: &Manifold) -> Self {
        Self::unchecked(m, vec![Expr::Num(0.0); m.dim()], None)
    }

    pub(crate) fn unchecked(m: &Manifold, components: Vec<Expr>, support: Option<SubBox>) -> Self {
        let d = m.dim();
        let jacobian: Vec<Vec<Expr>> =
            components.iter().map(|c| (0..d).map(|i| c.derivative(i)).collect()).collect();
        let divergence = (0..d).fold(Expr::Num(0.0), |acc, i| Expr::add(acc, jacobian[i][i].clone()));
        VectorField { components, jacobian, divergence, manifold: m.clone(), support }
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn jacobian(&self) -> &[Vec<Expr>] {
        &self.jacobian
    }

    pub fn divergence(&self) -> &Expr {
        &self.divergence
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn support(&self) -> Option<&SubBox> {
        self.support.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval(p)).collect()
    }

    /// Components at a cover point, transported by the deck map's linear part.
    pub fn eval_cover(&self, q: &[f64]) -> Result<Vec<f64>> {
        let (c, p) = self.manifold.reduce_point(q);
        let signs = self.manifold.deck_signs(&c);
        self.components.iter().zip(signs).map(|(e, s)| Ok(s * e.eval(&p)?)).collect()
    }

    pub fn divergence_cover(&self, q: &[f64]) -> Result<f64> {
        let (_, p) = self.manifold.reduce_point(q);
        self.divergence.eval(&p)
    }

    /// Whether `q` (cover coordinates) lies outside the declared support.
    pub fn outside_support(&self, q: &[f64]) -> bool {
        match &self.support {
            None => false,
            Some(b) => !b.contains(&self.manifold.reduce_point(q).1),
        }
    }

    pub fn check_margin(&self, grid: &Grid) -> Result<()> {
        check_margin(grid, self.support.as_ref())
    }

    /// The field `f v`.
    pub fn scaled(&self, f: &ScalarField) -> VectorField {
        let comps = self.components.iter().map(|c| Expr::mul(c.clone(), f.expr.clone())).collect();
        let support = match (&self.support, &f.support) {
            (Some(a), _) => Some(a.clone()),
            (None, b) => b.clone(),
        };
        Self::unchecked(&self.manifold, comps, support)
    }

    /// The field `c v` for a constant `c`.
    pub fn times(&self, c: f64) -> VectorField {
        let comps = self.components.iter().map(|e| Expr::mul(Expr::Num(c), e.clone())).collect();
        Self::unchecked(&self.manifold, comps, self.support.clone())
    }

    /// The field `v + w`.
    pub fn plus(&self, w: &VectorField) -> Result<VectorField> {
        same_manifold(&self.manifold, &w.manifold)?;
        let comps = self.components.iter().zip(&w.components).map(|(a, b)| Expr::add(a.clone(), b.clone())).collect();
        Ok(Self::unchecked(&self.manifold, comps, hull(&self.support, &w.support)))
    }

    /// Derivative of `f` along the field, `v·∇f`.
    pub fn apply(&self, f: &ScalarField) -> Expr {
        self.components
            .iter()
            .zip(&f.gradient)
            .fold(Expr::Num(0.0), |acc, (v, g)| Expr::add(acc, Expr::mul(v.clone(), g.clone())))
    }
}

fn hull(a: &Option<SubBox>, b: &Option<SubBox>) -> Option<SubBox> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.hull(b)),
        _ => None,
    }
}

fn same_manifold(a: &Manifold, b: &Manifold) -> Result<()> {
    if a.spec() != b.spec() {
        return Err(Error::InvalidParam(format!("fields live on different manifolds: {} vs {}", a.spec(), b.spec())));
    }
    Ok(())
}

/// Components of `(v·∇)w - (w·∇)v`.
pub fn bracket_components(v: &[Expr], w: &[Expr]) -> Vec<Expr> {
    let d = v.len();
    (0..d)
        .map(|j| {
            (0..d).fold(Expr::Num(0.0), |acc, i| {
                let a = Expr::mul(v[i].clone(), w[j].derivative(i));
                let b = Expr::mul(w[i].clone(), v[j].derivative(i));
                Expr::add(acc, Expr::sub(a, b))
            })
        })
        .collect()
}

pub fn lie_bracket(v: &VectorField, w: &VectorField) -> Result<VectorField> {
    same_manifold(&v.manifold, &w.manifold)?;
    let comps = bracket_components(&v.components, &w.components);
    Ok(VectorField::unchecked(&v.manifold, comps, hull(&v.support, &w.support)))
}

fn check_margin(grid: &Grid, support: Option<&SubBox>) -> Result<()> {
    let m = grid.manifold();
    for a in 0..m.dim() {
        if m.is_periodic(a) {
            continue;
        }
        let margin = MARGIN_STEPS * grid.h()[a];
        let Some(b) = support else {
            return Err(Error::SupportViolation(format!("axis {a} is truncated but no support box was given")));
        };
        if !(b.lo[a] > m.lo()[a] + margin && b.hi[a] < m.hi()[a] - margin) {
            return Err(Error::SupportViolation(format!(
                "support [{}, {}] on axis {a} is within {margin} of the truncation",
                b.lo[a], b.hi[a]
            )));
        }
    }
    Ok(())
}

fn check_vars(d: usize, comps: &[Expr]) -> Result<()> {
    if let Some(v) = comps.iter().filter_map(Expr::max_var).max() {
        if v >= d {
            return Err(Error::InvalidParam(format!("expression uses coordinate {} on a {d}-dimensional chart", v + 1)));
        }
    }
    Ok(())
}

fn validate_unbounded(m: &Manifold, comps: &[Expr]) -> Result<()> {
    check_vars(m.dim(), comps)?;
    check_gluing(m, comps, false)
}

fn validate(m: &Manifold, comps: &[Expr], support: Option<&SubBox>, vector: bool) -> Result<()> {
    let d = m.dim();
    check_vars(d, comps)?;
    let truncated: Vec<usize> = (0..d).filter(|&a| !m.is_periodic(a)).collect();
    match support {
        Some(b) => {
            if b.dim() != d {
                return Err(Error::InvalidParam(format!("support box has dimension {}, chart has {d}", b.dim())));
            }
            for a in 0..d {
                let ok = if m.is_periodic(a) {
                    b.lo[a] >= m.lo()[a] && b.hi[a] <= m.hi()[a]
                } else {
                    b.lo[a] > m.lo()[a] && b.hi[a] < m.hi()[a]
                };
                if !ok {
                    return Err(Error::SupportViolation(format!("support box leaves the domain on axis {a}")));
                }
            }
            check_support(m, comps, b)?;
        }
        None if !truncated.is_empty() => {
            return Err(Error::SupportViolation(format!("axis {} is truncated; a support box is required", truncated[0])));
        }
        None => {}
    }
    check_gluing(m, comps, vector)
}

/// Samples a shifted lattice over the domain and requires exact vanishing
/// (to `SUPPORT_TOL`) outside the box.
fn check_support(m: &Manifold, comps: &[Expr], b: &SubBox) -> Result<()> {
    const N: usize = 97;
    let d = m.dim();
    let total = N.pow(d as u32);
    let mut p = vec![0.0; d];
    for k in 0..total {
        let mut r = k;
        for (a, pa) in p.iter_mut().enumerate() {
            let t = ((r % N) as f64 + 0.5) / N as f64;
            r /= N;
            *pa = m.lo()[a] + t * m.length(a);
        }
        if b.contains(&p) {
            continue;
        }
        for c in comps {
            let v = c.eval(&p)?;
            if v.abs() >= SUPPORT_TOL {
                return Err(Error::SupportViolation(format!("value {v:e} at {p:?} outside the support box")));
            }
        }
    }
    Ok(())
}

/// Values and first derivatives must match across every edge gluing.
fn check_gluing(m: &Manifold, comps: &[Expr], vector: bool) -> Result<()> {
    const N: usize = 17;
    let d = m.dim();
    let grads: Vec<Vec<Expr>> = comps.iter().map(|c| (0..d).map(|i| c.derivative(i)).collect()).collect();
    for rule in m.edge_rules() {
        let g = m.presentation().letter(crate::homotopy::Letter::new(rule.generator, false))?;
        let signs = m.deck_signs(&g);
        for k in 0..N.pow(d as u32 - 1) {
            let mut p = m.lo().to_vec();
            let mut r = k;
            for a in (0..d).filter(|&a| a != rule.axis) {
                p[a] = m.lo()[a] + ((r % N) as f64 + 0.25) / N as f64 * m.length(a);
                r /= N;
            }
            let q = m.deck_action(&g, &p);
            for (j, c) in comps.iter().enumerate() {
                let sj = if vector { signs[j] } else { 1.0 };
                let (vp, vq) = (c.eval(&p)?, c.eval(&q)?);
                if (vq - sj * vp).abs() > GLUE_TOL * vp.abs().max(1.0) {
                    return Err(Error::Periodicity(format!(
                        "component {j} differs across the axis-{} gluing: {vp} at {p:?} vs {vq} at {q:?}",
                        rule.axis
                    )));
                }
                for (i, gi) in grads[j].iter().enumerate() {
                    let (dp, dq) = (gi.eval(&p)?, gi.eval(&q)?);
                    if (dq - sj * signs[i] * dp).abs() > GLUE_DERIV_TOL * dp.abs().max(1.0) {
                        return Err(Error::Periodicity(format!(
                            "derivative {i} of component {j} differs across the axis-{} gluing at {p:?}",
                            rule.axis
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}
