//! Built-in manifolds, their fundamental domains, deck groups and grids.
//!
//! Every manifold is presented as an axis-aligned box in its universal cover
//! `R^dim`. Periodic axes are identified by deck transformations; truncated
//! axes (the line, the radial direction of the annulus) are plain intervals on
//! which everything must vanish near the ends.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::{GroupKind, HomotopyClass, Letter, Pi1Presentation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ManifoldSpec {
    /// The interval `(-half_width, half_width)` standing in for `R`.
    Line { half_width: f64 },
    Circle { length: f64 },
    Torus { lengths: [f64; 2] },
    /// Angular axis of circumference `length` times a radial interval `(0, width)`.
    Annulus { length: f64, width: f64 },
    KleinBottle { lengths: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManifoldKind {
    Line,
    Circle,
    Torus,
    Annulus,
    KleinBottle,
}

impl ManifoldSpec {
    pub fn kind(&self) -> ManifoldKind {
        match self {
            ManifoldSpec::Line { .. } => ManifoldKind::Line,
            ManifoldSpec::Circle { .. } => ManifoldKind::Circle,
            ManifoldSpec::Torus { .. } => ManifoldKind::Torus,
            ManifoldSpec::Annulus { .. } => ManifoldKind::Annulus,
            ManifoldSpec::KleinBottle { .. } => ManifoldKind::KleinBottle,
        }
    }

    fn lengths(&self) -> Vec<f64> {
        match *self {
            ManifoldSpec::Line { half_width } => vec![half_width],
            ManifoldSpec::Circle { length } => vec![length],
            ManifoldSpec::Torus { lengths } | ManifoldSpec::KleinBottle { lengths } => lengths.to_vec(),
            ManifoldSpec::Annulus { length, width } => vec![length, width],
        }
    }
}

impl std::fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ManifoldSpec::Line { half_width } => write!(f, "line(X={half_width})"),
            ManifoldSpec::Circle { length } => write!(f, "circle(L={length})"),
            ManifoldSpec::Torus { lengths } => write!(f, "torus(L1={}, L2={})", lengths[0], lengths[1]),
            ManifoldSpec::Annulus { length, width } => write!(f, "annulus(L={length}, W={width})"),
            ManifoldSpec::KleinBottle { lengths } => write!(f, "klein-bottle(L1={}, L2={})", lengths[0], lengths[1]),
        }
    }
}

/// How one pair of opposite edges is glued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRule {
    /// Axis whose `lo` and `hi` faces are identified.
    pub axis: usize,
    /// Generator crossed when leaving through the `hi` face.
    pub generator: usize,
    /// Axis reflected by the gluing, if it reverses orientation.
    pub reflects: Option<usize>,
}

/// Axis-aligned box in chart coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SubBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidParam(format!("degenerate box {lo:?} .. {hi:?}")));
        }
        Ok(SubBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    /// Smallest box containing both.
    pub fn hull(&self, other: &SubBox) -> SubBox {
        SubBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    pub fn intersects(&self, other: &SubBox) -> bool {
        (0..self.dim()).all(|i| self.lo[i] < other.hi[i] && other.lo[i] < self.hi[i])
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifold {
    spec: ManifoldSpec,
    lo: Vec<f64>,
    hi: Vec<f64>,
    periodic: Vec<bool>,
    edge_rules: Vec<EdgeRule>,
    presentation: Pi1Presentation,
}

pub fn make_manifold(spec: ManifoldSpec) -> Result<Manifold> {
    for l in spec.lengths() {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidParam(format!("{spec}: lengths must be positive and finite")));
        }
    }
    let periodic_rule = |axis| EdgeRule { axis, generator: axis, reflects: None };
    let m = match spec {
        ManifoldSpec::Line { half_width } => Manifold {
            spec,
            lo: vec![-half_width],
            hi: vec![half_width],
            periodic: vec![false],
            edge_rules: vec![],
            presentation: Pi1Presentation::trivial(),
        },
        ManifoldSpec::Circle { length } => Manifold {
            spec,
            lo: vec![0.0],
            hi: vec![length],
            periodic: vec![true],
            edge_rules: vec![periodic_rule(0)],
            presentation: Pi1Presentation::integers(),
        },
        ManifoldSpec::Torus { lengths } => Manifold {
            spec,
            lo: vec![0.0, 0.0],
            hi: lengths.to_vec(),
            periodic: vec![true, true],
            edge_rules: vec![periodic_rule(0), periodic_rule(1)],
            presentation: Pi1Presentation::z2(),
        },
        ManifoldSpec::Annulus { length, width } => Manifold {
            spec,
            lo: vec![0.0, 0.0],
            hi: vec![length, width],
            periodic: vec![true, false],
            edge_rules: vec![periodic_rule(0)],
            presentation: Pi1Presentation::integers(),
        },
        ManifoldSpec::KleinBottle { lengths } => Manifold {
            spec,
            lo: vec![0.0, 0.0],
            hi: lengths.to_vec(),
            periodic: vec![true, true],
            edge_rules: vec![periodic_rule(0), EdgeRule { axis: 1, generator: 1, reflects: Some(0) }],
            presentation: Pi1Presentation::klein_bottle(),
        },
    };
    Ok(m)
}

impl Manifold {
    pub fn spec(&self) -> &ManifoldSpec {
        &self.spec
    }

    pub fn kind(&self) -> ManifoldKind {
        self.spec.kind()
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        self.periodic[axis]
    }

    pub fn edge_rules(&self) -> &[EdgeRule] {
        &self.edge_rules
    }

    pub fn presentation(&self) -> &Pi1Presentation {
        &self.presentation
    }

    /// The measure density in the chart (Lebesgue).
    pub fn measure_density(&self, _x: &[f64]) -> f64 {
        1.0
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.length(a)).product()
    }

    pub fn min_edge_length(&self) -> f64 {
        (0..self.dim()).map(|a| self.length(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn domain(&self) -> SubBox {
        SubBox { lo: self.lo.clone(), hi: self.hi.clone() }
    }

    /// Deck transformation of a canonical class acting on a cover point.
    pub fn deck_action(&self, c: &HomotopyClass, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        match self.presentation.kind {
            GroupKind::Trivial => {}
            GroupKind::FreeAbelian(_) => {
                for (axis, &e) in c.exponents.iter().enumerate() {
                    y[axis] += e as f64 * self.length(axis);
                }
            }
            GroupKind::KleinBottle => {
                // a^m b^n: apply b^n first, then a^m
                let (m, n) = (c.exponents[0], c.exponents[1]);
                if n.rem_euclid(2) == 1 {
                    y[0] = self.length(0) - y[0];
                }
                y[1] += n as f64 * self.length(1);
                y[0] += m as f64 * self.length(0);
            }
        }
        y
    }

    /// Deck action of a raw word; letters act right to left.
    pub fn deck_action_word(&self, word: &[Letter], x: &[f64]) -> Result<Vec<f64>> {
        let c = self.presentation.reduce(word)?;
        Ok(self.deck_action(&c, x))
    }

    /// Diagonal of the (constant) linear part of the deck map.
    pub fn deck_signs(&self, c: &HomotopyClass) -> Vec<f64> {
        let mut s = vec![1.0; self.dim()];
        if self.presentation.kind == GroupKind::KleinBottle && c.exponents[1].rem_euclid(2) == 1 {
            s[0] = -1.0;
        }
        s
    }

    /// Splits a cover point into the class of its sheet and the matching point
    /// of the fundamental domain: `q = deck_action(class, p)`.
    pub fn reduce_point(&self, q: &[f64]) -> (HomotopyClass, Vec<f64>) {
        let mut c = self.presentation.identity();
        let mut p = q.to_vec();
        match self.presentation.kind {
            GroupKind::Trivial => {}
            GroupKind::FreeAbelian(_) => {
                for axis in 0..self.dim() {
                    if self.periodic[axis] {
                        let (k, r) = wrap(q[axis] - self.lo[axis], self.length(axis));
                        c.exponents[axis] = k;
                        p[axis] = self.lo[axis] + r;
                    }
                }
            }
            GroupKind::KleinBottle => {
                let (l1, l2) = (self.length(0), self.length(1));
                let (nb, y) = wrap(q[1], l2);
                let x = if nb.rem_euclid(2) == 1 { l1 - q[0] } else { q[0] };
                let (ma, x) = wrap(x, l1);
                let sign = if nb.rem_euclid(2) == 1 { -1 } else { 1 };
                c.exponents = vec![sign * ma, nb];
                p = vec![x, y];
            }
        }
        (c, p)
    }

    /// Whether `b` sits strictly inside the fundamental domain, keeping
    /// `margin[axis]` away from every face.
    pub fn box_inside(&self, b: &SubBox, margin: &[f64]) -> bool {
        (0..self.dim()).all(|a| b.lo[a] > self.lo[a] + margin[a] && b.hi[a] < self.hi[a] - margin[a])
    }
}

/// `x = k * len + r` with `0 <= r < len`.
fn wrap(x: f64, len: f64) -> (i64, f64) {
    let mut k = (x / len).floor();
    let mut r = x - k * len;
    if r >= len {
        r -= len;
        k += 1.0;
    }
    if r < 0.0 {
        r += len;
        k -= 1.0;
        if r >= len {
            r = 0.0;
        }
    }
    (k as i64, r)
}

pub const MIN_GRID_POINTS: usize = 8;

/// Uniform half-open lattice on the fundamental domain, x-index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    manifold: Manifold,
    n: Vec<usize>,
    h: Vec<f64>,
}

pub fn make_grid(m: &Manifold, n: &[usize]) -> Result<Grid> {
    if n.len() != m.dim() {
        return Err(Error::InvalidParam(format!("expected {} grid sizes, got {}", m.dim(), n.len())));
    }
    if let Some(bad) = n.iter().find(|&&k| k < MIN_GRID_POINTS) {
        return Err(Error::InvalidParam(format!("grid size {bad} below minimum {MIN_GRID_POINTS}")));
    }
    let h = n.iter().enumerate().map(|(a, &k)| m.length(a) / k as f64).collect();
    Ok(Grid { manifold: m.clone(), n: n.to_vec(), h })
}

impl Grid {
    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn n(&self) -> &[usize] {
        &self.n
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of every node.
    pub fn weight(&self) -> f64 {
        self.h.iter().product()
    }

    pub fn total_weight(&self) -> f64 {
        self.weight() * self.len() as f64
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().rev().zip(self.n.iter().rev()).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        self.n
            .iter()
            .map(|&n| {
                let i = flat % n;
                flat /= n;
                i
            })
            .collect()
    }

    /// Chart coordinate of lattice index `i` on `axis`; any integer is allowed
    /// so the lattice extends over the cover.
    pub fn coord(&self, axis: usize, i: i64) -> f64 {
        self.manifold.lo[axis] + i as f64 * self.h[axis]
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi(flat).iter().enumerate().map(|(a, &i)| self.coord(a, i as i64)).collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Continuous lattice coordinates of a cover point.
    pub fn lattice_coords(&self, x: &[f64]) -> Vec<f64> {
        x.iter().enumerate().map(|(a, v)| (v - self.manifold.lo[a]) / self.h[a]).collect()
    }

    /// Reduces a cover lattice node to its sheet class and flat domain index.
    /// Returns `None` for nodes beyond a truncated axis.
    pub fn reduce_node(&self, idx: &[i64]) -> Option<(HomotopyClass, usize)> {
        let m = &self.manifold;
        let mut c = m.presentation.identity();
        let mut local = vec![0usize; self.dim()];
        match m.presentation.kind {
            GroupKind::Trivial | GroupKind::FreeAbelian(_) => {
                for a in 0..self.dim() {
                    let n = self.n[a] as i64;
                    if m.periodic[a] {
                        c.exponents[a] = idx[a].div_euclid(n);
                        local[a] = idx[a].rem_euclid(n) as usize;
                    } else if (0..n).contains(&idx[a]) {
                        local[a] = idx[a] as usize;
                    } else {
                        return None;
                    }
                }
            }
            GroupKind::KleinBottle => {
                let (n1, n2) = (self.n[0] as i64, self.n[1] as i64);
                let nb = idx[1].div_euclid(n2);
                let odd = nb.rem_euclid(2) == 1;
                let i = if odd { n1 - idx[0] } else { idx[0] };
                let ma = i.div_euclid(n1);
                c.exponents = vec![if odd { -ma } else { ma }, nb];
                local = vec![i.rem_euclid(n1) as usize, idx[1].rem_euclid(n2) as usize];
            }
        }
        Some((c, self.flat(&local)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn klein() -> Manifold {
        make_manifold(ManifoldSpec::KleinBottle { lengths: [1.0, 1.0] }).unwrap()
    }

    fn word(codes: &[i64]) -> Vec<Letter> {
        codes.iter().map(|&c| Letter::from_signed(c).unwrap()).collect()
    }

    #[test]
    fn presentations_per_kind() {
        let c = make_manifold(ManifoldSpec::Circle { length: 2.0 * PI }).unwrap();
        assert_eq!(c.presentation().rank(), 1);
        assert!(c.presentation().relations.is_empty());
        assert_eq!(c.edge_rules().len(), 1);
        let t = make_manifold(ManifoldSpec::Torus { lengths: [1.0, 1.0] }).unwrap();
        assert_eq!(t.presentation().relations, vec![word(&[1, 2, -1, -2])]);
        let k = klein();
        assert_eq!(k.presentation().relations, vec![word(&[2, 1, -2, 1])]);
        assert_eq!(k.edge_rules()[1].reflects, Some(0));
        let l = make_manifold(ManifoldSpec::Line { half_width: 10.0 }).unwrap();
        assert_eq!(l.presentation().rank(), 0);
    }

    #[test]
    fn nonpositive_lengths_are_rejected() {
        assert!(make_manifold(ManifoldSpec::Circle { length: 0.0 }).is_err());
        assert!(make_manifold(ManifoldSpec::Annulus { length: 1.0, width: -1.0 }).is_err());
    }

    #[test]
    fn deck_examples() {
        let c = make_manifold(ManifoldSpec::Circle { length: 2.0 * PI }).unwrap();
        assert_eq!(c.deck_action_word(&word(&[1]), &[0.5]).unwrap(), vec![0.5 + 2.0 * PI]);
        let t = make_manifold(ManifoldSpec::Torus { lengths: [1.0, 1.0] }).unwrap();
        let y = t.deck_action_word(&word(&[1, -2]), &[0.2, 0.3]).unwrap();
        assert!((y[0] - 1.2).abs() < 1e-15 && (y[1] + 0.7).abs() < 1e-15);
        let y = klein().deck_action_word(&word(&[2, 2]), &[0.2, 0.3]).unwrap();
        assert!((y[0] - 0.2).abs() < 1e-15 && (y[1] - 2.3).abs() < 1e-15);
        let y = klein().deck_action_word(&word(&[2]), &[0.2, 0.3]).unwrap();
        assert!((y[0] - 0.8).abs() < 1e-15 && (y[1] - 1.3).abs() < 1e-15);
        assert!(matches!(c.deck_action_word(&word(&[2]), &[0.0]), Err(Error::InvalidWord { .. })));
    }

    #[test]
    fn edge_rules_compose_to_the_relation() {
        // walk around the Klein square applying raw generator maps one at a time
        let k = klein();
        let x = [0.31, 0.72];
        let mut y = x.to_vec();
        for l in k.presentation().relations[0].iter().rev() {
            let g = k.presentation().letter(*l).unwrap();
            y = k.deck_action(&g, &y);
        }
        assert!((y[0] - x[0]).abs() < 1e-15 && (y[1] - x[1]).abs() < 1e-15);
    }

    #[test]
    fn grid_examples() {
        let c = make_manifold(ManifoldSpec::Circle { length: 2.0 * PI }).unwrap();
        let g = make_grid(&c, &[8]).unwrap();
        assert_eq!(g.h()[0], PI / 4.0);
        assert!((g.point(7)[0] - 7.0 * PI / 4.0).abs() < 1e-15);
        assert!((g.total_weight() - 2.0 * PI).abs() < 1e-14);
        let t = make_manifold(ManifoldSpec::Torus { lengths: [1.0, 1.0] }).unwrap();
        let g = make_grid(&t, &[8, 8]).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.weight(), 1.0 / 64.0);
        assert!(make_grid(&t, &[4, 4]).is_err());
        let l = make_manifold(ManifoldSpec::Line { half_width: 10.0 }).unwrap();
        let g = make_grid(&l, &[16]).unwrap();
        assert_eq!(g.point(0)[0], -10.0);
        assert!(g.point(15)[0] < 10.0);
    }

    #[test]
    fn flat_and_multi_are_inverse() {
        let t = make_manifold(ManifoldSpec::Torus { lengths: [1.0, 2.0] }).unwrap();
        let g = make_grid(&t, &[8, 10]).unwrap();
        for k in 0..g.len() {
            assert_eq!(g.flat(&g.multi(k)), k);
        }
        assert_eq!(g.multi(9), vec![1, 1]);
    }

    #[test]
    fn klein_node_reduction_matches_point_reduction() {
        let k = klein();
        let g = make_grid(&k, &[8, 8]).unwrap();
        for i in -20..20i64 {
            for j in -20..20i64 {
                let (c, flat) = g.reduce_node(&[i, j]).unwrap();
                let p = g.point(flat);
                let q = k.deck_action(&c, &p);
                assert!((q[0] - g.coord(0, i)).abs() < 1e-12 && (q[1] - g.coord(1, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn truncated_nodes_fall_off() {
        let a = make_manifold(ManifoldSpec::Annulus { length: 1.0, width: 1.0 }).unwrap();
        let g = make_grid(&a, &[8, 8]).unwrap();
        assert!(g.reduce_node(&[3, 8]).is_none());
        let (c, flat) = g.reduce_node(&[9, 2]).unwrap();
        assert_eq!(c.exponents, vec![1]);
        assert_eq!(flat, g.flat(&[1, 2]));
    }

    fn any_manifold() -> impl Strategy<Value = Manifold> {
        prop_oneof![
            (0.5f64..5.0).prop_map(|l| make_manifold(ManifoldSpec::Circle { length: l }).unwrap()),
            (0.5f64..5.0, 0.5f64..5.0)
                .prop_map(|(a, b)| make_manifold(ManifoldSpec::Torus { lengths: [a, b] }).unwrap()),
            (0.5f64..5.0, 0.5f64..5.0)
                .prop_map(|(a, b)| make_manifold(ManifoldSpec::KleinBottle { lengths: [a, b] }).unwrap()),
            (0.5f64..5.0, 0.5f64..5.0)
                .prop_map(|(a, b)| make_manifold(ManifoldSpec::Annulus { length: a, width: b }).unwrap()),
        ]
    }

    fn random_word(rank: usize) -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec((0..rank.max(1), any::<bool>()), 0..=4)
            .prop_map(|v| v.into_iter().map(|(g, i)| Letter::new(g, i)).collect())
    }

    proptest! {
        #[test]
        fn relations_act_trivially(m in any_manifold(), x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let p: Vec<f64> = [x, y][..m.dim()].to_vec();
            for rel in &m.presentation().relations {
                let mut q = p.clone();
                for l in rel.iter().rev() {
                    q = m.deck_action(&m.presentation().letter(*l).unwrap(), &q);
                }
                for a in 0..m.dim() {
                    prop_assert!((q[a] - p[a]).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn deck_is_a_left_action(
            m in any_manifold(),
            w1 in random_word(2),
            w2 in random_word(2),
            x in -3.0f64..3.0,
            y in -3.0f64..3.0,
        ) {
            let r = m.presentation().rank();
            prop_assume!(w1.iter().chain(&w2).all(|l| l.generator < r));
            let p: Vec<f64> = [x, y][..m.dim()].to_vec();
            let joined: Vec<Letter> = w1.iter().chain(&w2).copied().collect();
            let lhs = m.deck_action_word(&joined, &p).unwrap();
            let rhs = m.deck_action_word(&w1, &m.deck_action_word(&w2, &p).unwrap()).unwrap();
            for a in 0..m.dim() {
                prop_assert!((lhs[a] - rhs[a]).abs() < 1e-11);
            }
        }

        #[test]
        fn reduce_point_inverts_deck(m in any_manifold(), x in -20.0f64..20.0, y in -20.0f64..20.0) {
            let q: Vec<f64> = [x, y][..m.dim()].to_vec();
            let (c, p) = m.reduce_point(&q);
            for a in 0..m.dim() {
                if m.is_periodic(a) {
                    prop_assert!(p[a] >= m.lo()[a] && p[a] < m.hi()[a]);
                }
            }
            let back = m.deck_action(&c, &p);
            for a in 0..m.dim() {
                prop_assert!((back[a] - q[a]).abs() < 1e-12);
            }
        }

        #[test]
        fn grid_weight_is_volume(m in any_manifold(), n0 in 8usize..64, n1 in 8usize..64) {
            let n: Vec<usize> = [n0, n1][..m.dim()].to_vec();
            let g = make_grid(&m, &n).unwrap();
            prop_assert!((g.total_weight() - m.volume()).abs() <= 1e-12 * m.volume());
        }
    }
}
