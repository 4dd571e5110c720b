//! Fundamental-group bookkeeping: presentations, canonical homotopy classes,
//! crossing records of cover paths and unitary representations.
//!
//! Three group shapes cover the built-in manifolds:
//!
//! * the trivial group (the line),
//! * free abelian groups of rank 1 or 2 (circle, annulus, torus), stored as
//!   exponent vectors,
//! * the Klein-bottle group `<a, b | b a b^-1 a>`, stored in the normal form
//!   `a^m b^n`, which is unique because `b a = a^-1 b`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::Manifold;

pub type CMatrix = DMatrix<Complex64>;

/// One generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    /// Signed, 1-based encoding: `+1` is the first generator, `-2` the inverse
    /// of the second.
    pub fn from_signed(code: i64) -> Result<Self> {
        if code == 0 {
            return Err(Error::InvalidWord { index: 0, generators: 0 });
        }
        Ok(Letter { generator: code.unsigned_abs() as usize - 1, inverse: code < 0 })
    }

    pub fn signed(self) -> i64 {
        let g = self.generator as i64 + 1;
        if self.inverse {
            -g
        } else {
            g
        }
    }
}

/// Shape of the group, which fixes the canonical form of its elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    Trivial,
    FreeAbelian(usize),
    KleinBottle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pi1Presentation {
    pub generators: Vec<String>,
    pub relations: Vec<Vec<Letter>>,
    pub abelian: bool,
    pub kind: GroupKind,
}

/// A homotopy class in canonical form.
///
/// For abelian groups `exponents[i]` is the exponent of generator `i`; for the
/// Klein bottle `exponents == [m, n]` encodes `a^m b^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomotopyClass {
    pub exponents: Vec<i64>,
}

impl HomotopyClass {
    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }
}

impl Pi1Presentation {
    pub fn trivial() -> Self {
        Pi1Presentation { generators: vec![], relations: vec![], abelian: true, kind: GroupKind::Trivial }
    }

    pub fn integers() -> Self {
        Pi1Presentation {
            generators: vec!["a".into()],
            relations: vec![],
            abelian: true,
            kind: GroupKind::FreeAbelian(1),
        }
    }

    pub fn z2() -> Self {
        let (a, b) = (Letter::new(0, false), Letter::new(1, false));
        let (ai, bi) = (Letter::new(0, true), Letter::new(1, true));
        Pi1Presentation {
            generators: vec!["a".into(), "b".into()],
            relations: vec![vec![a, b, ai, bi]],
            abelian: true,
            kind: GroupKind::FreeAbelian(2),
        }
    }

    pub fn klein_bottle() -> Self {
        let (a, b) = (Letter::new(0, false), Letter::new(1, false));
        let bi = Letter::new(1, true);
        Pi1Presentation {
            generators: vec!["a".into(), "b".into()],
            relations: vec![vec![b, a, bi, a]],
            abelian: false,
            kind: GroupKind::KleinBottle,
        }
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn identity(&self) -> HomotopyClass {
        HomotopyClass { exponents: vec![0; self.rank()] }
    }

    pub fn letter(&self, letter: Letter) -> Result<HomotopyClass> {
        if letter.generator >= self.rank() {
            return Err(Error::InvalidWord { index: letter.generator, generators: self.rank() });
        }
        let mut c = self.identity();
        c.exponents[letter.generator] = if letter.inverse { -1 } else { 1 };
        Ok(c)
    }

    /// Group product `lhs · rhs` (word concatenation).
    pub fn compose(&self, lhs: &HomotopyClass, rhs: &HomotopyClass) -> HomotopyClass {
        match self.kind {
            GroupKind::Trivial => self.identity(),
            GroupKind::FreeAbelian(_) => HomotopyClass {
                exponents: lhs.exponents.iter().zip(&rhs.exponents).map(|(a, b)| a + b).collect(),
            },
            GroupKind::KleinBottle => {
                // a^m1 b^n1 a^m2 b^n2 = a^(m1 + (-1)^n1 m2) b^(n1 + n2)
                let (m1, n1) = (lhs.exponents[0], lhs.exponents[1]);
                let (m2, n2) = (rhs.exponents[0], rhs.exponents[1]);
                let sign = if n1.rem_euclid(2) == 0 { 1 } else { -1 };
                HomotopyClass { exponents: vec![m1 + sign * m2, n1 + n2] }
            }
        }
    }

    pub fn inverse(&self, c: &HomotopyClass) -> HomotopyClass {
        match self.kind {
            GroupKind::Trivial => self.identity(),
            GroupKind::FreeAbelian(_) => HomotopyClass { exponents: c.exponents.iter().map(|e| -e).collect() },
            GroupKind::KleinBottle => {
                let (m, n) = (c.exponents[0], c.exponents[1]);
                let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
                HomotopyClass { exponents: vec![-sign * m, -n] }
            }
        }
    }

    pub fn power(&self, c: &HomotopyClass, k: i64) -> HomotopyClass {
        let base = if k < 0 { self.inverse(c) } else { c.clone() };
        (0..k.unsigned_abs()).fold(self.identity(), |acc, _| self.compose(&acc, &base))
    }

    /// Canonical form of an arbitrary word.
    pub fn reduce(&self, word: &[Letter]) -> Result<HomotopyClass> {
        word.iter().try_fold(self.identity(), |acc, &l| Ok(self.compose(&acc, &self.letter(l)?)))
    }

    /// A word spelling out the canonical form.
    pub fn word_of(&self, c: &HomotopyClass) -> Vec<Letter> {
        let mut word = Vec::new();
        for (g, &e) in c.exponents.iter().enumerate() {
            word.extend(std::iter::repeat_n(Letter::new(g, e < 0), e.unsigned_abs() as usize));
        }
        word
    }
}

/// Class of a path sampled in cover coordinates, assembled from the deck
/// transitions between consecutive samples in traversal order.
pub fn track_crossings(m: &Manifold, cover_path: &[Vec<f64>]) -> Result<HomotopyClass> {
    let p = m.presentation();
    let limit = m.min_edge_length() / 4.0;
    let mut class = p.identity();
    let Some(first) = cover_path.first() else {
        return Ok(class);
    };
    let (mut prev_word, _) = m.reduce_point(first);
    for (index, pair) in cover_path.windows(2).enumerate() {
        let step = pair[0].iter().zip(&pair[1]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if !(step < limit) {
            return Err(Error::PathTooCoarse { index: index + 1, step, limit });
        }
        let (word, _) = m.reduce_point(&pair[1]);
        if word != prev_word {
            let transition = p.compose(&p.inverse(&prev_word), &word);
            class = p.compose(&class, &transition);
            prev_word = word;
        }
    }
    Ok(class)
}

/// A unitary representation of the fundamental group on `C^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pi1Representation {
    pub presentation: Pi1Presentation,
    pub fiber_dim: usize,
    pub matrices: Vec<CMatrix>,
}

pub const UNITARITY_TOL: f64 = 1e-12;

impl Pi1Representation {
    /// Validates unitarity and the relations of the presentation.
    pub fn new(presentation: Pi1Presentation, matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.len() != presentation.rank() {
            return Err(Error::InvalidRepresentation(format!(
                "expected {} generator matrices, got {}",
                presentation.rank(),
                matrices.len()
            )));
        }
        let fiber_dim = matrices.first().map_or(1, |m| m.nrows());
        if fiber_dim == 0 {
            return Err(Error::InvalidRepresentation("fiber dimension must be at least 1".into()));
        }
        for (g, mat) in matrices.iter().enumerate() {
            if mat.nrows() != fiber_dim || mat.ncols() != fiber_dim {
                return Err(Error::InvalidRepresentation(format!(
                    "generator {} is {}x{}, expected {fiber_dim}x{fiber_dim}",
                    presentation.generators[g],
                    mat.nrows(),
                    mat.ncols()
                )));
            }
            let res = unitarity_residual(mat);
            if res > UNITARITY_TOL {
                return Err(Error::InvalidRepresentation(format!(
                    "generator {} is not unitary (residual {res:.3e})",
                    presentation.generators[g]
                )));
            }
        }
        let rep = Pi1Representation { presentation, fiber_dim, matrices };
        for (i, rel) in rep.presentation.relations.iter().enumerate() {
            let res = rep.relation_residual(rel);
            if res > UNITARITY_TOL {
                return Err(Error::InvalidRepresentation(format!("relation {i} violated (residual {res:.3e})")));
            }
        }
        Ok(rep)
    }

    pub fn trivial(presentation: Pi1Presentation, fiber_dim: usize) -> Self {
        let matrices = vec![CMatrix::identity(fiber_dim, fiber_dim); presentation.rank()];
        Pi1Representation { presentation, fiber_dim, matrices }
    }

    /// One-dimensional representation `g_j -> exp(i angle_j)`.
    pub fn from_angles(presentation: Pi1Presentation, angles: &[f64]) -> Result<Self> {
        // angles differing by whole turns give bit-identical characters
        let matrices = angles
            .iter()
            .map(|&t| CMatrix::from_element(1, 1, Complex64::from_polar(1.0, t.rem_euclid(2.0 * std::f64::consts::PI))))
            .collect();
        Self::new(presentation, matrices)
    }

    /// `R(w)` for a raw word, multiplying generator matrices left to right.
    pub fn evaluate_word(&self, word: &[Letter]) -> CMatrix {
        let k = self.fiber_dim;
        word.iter().fold(CMatrix::identity(k, k), |acc, l| {
            let m = &self.matrices[l.generator];
            if l.inverse {
                acc * m.adjoint()
            } else {
                acc * m
            }
        })
    }

    pub fn relation_residual(&self, relation: &[Letter]) -> f64 {
        let k = self.fiber_dim;
        (self.evaluate_word(relation) - CMatrix::identity(k, k)).norm()
    }

    /// Representation of a canonical class.
    pub fn evaluate(&self, c: &HomotopyClass) -> CMatrix {
        let k = self.fiber_dim;
        let mut acc = CMatrix::identity(k, k);
        for (g, &e) in c.exponents.iter().enumerate() {
            let m = if e < 0 { self.matrices[g].adjoint() } else { self.matrices[g].clone() };
            for _ in 0..e.unsigned_abs() {
                acc *= &m;
            }
        }
        acc
    }

    /// Traces on the supplied classes; these are the unitary-equivalence data
    /// compared by the equivalence checker.
    pub fn conjugacy_invariants(&self, classes: &[HomotopyClass]) -> Vec<Complex64> {
        classes.iter().map(|c| self.evaluate(c).trace()).collect()
    }

    pub fn is_trivial(&self) -> bool {
        let k = self.fiber_dim;
        self.matrices.iter().all(|m| (m - CMatrix::identity(k, k)).norm() == 0.0)
    }

    /// Generator matrices conjugated by a fixed unitary, `S R(g) S^-1`.
    pub fn conjugated(&self, s: &CMatrix) -> Result<Self> {
        let mats = self.matrices.iter().map(|m| s * m * s.adjoint()).collect();
        Pi1Representation::new(self.presentation.clone(), mats)
    }

    /// Direct sum of two representations of the same group.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.presentation != other.presentation {
            return Err(Error::PresentationMismatch);
        }
        let (k1, k2) = (self.fiber_dim, other.fiber_dim);
        let mats = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| {
                let mut m = CMatrix::zeros(k1 + k2, k1 + k2);
                m.view_mut((0, 0), (k1, k1)).copy_from(a);
                m.view_mut((k1, k1), (k2, k2)).copy_from(b);
                m
            })
            .collect();
        Pi1Representation::new(self.presentation.clone(), mats)
    }
}

pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let k = m.nrows();
    (m.adjoint() * m - CMatrix::identity(k, k)).norm()
}

/// Wire format for representations: explicit matrices as row-major `(re, im)`
/// pairs, or the one-dimensional shortcut of one angle per generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum RepresentationInput {
    Angles { angles: Vec<f64> },
    Matrices { fiber_dim: usize, matrices: Vec<Vec<[f64; 2]>> },
}

impl RepresentationInput {
    pub fn build(&self, presentation: &Pi1Presentation) -> Result<Pi1Representation> {
        match self {
            RepresentationInput::Angles { angles } => {
                if angles.len() != presentation.rank() {
                    return Err(Error::InvalidRepresentation(format!(
                        "expected {} angles, got {}",
                        presentation.rank(),
                        angles.len()
                    )));
                }
                Pi1Representation::from_angles(presentation.clone(), angles)
            }
            RepresentationInput::Matrices { fiber_dim, matrices } => {
                let k = *fiber_dim;
                let mats = matrices
                    .iter()
                    .enumerate()
                    .map(|(g, entries)| {
                        if entries.len() != k * k {
                            return Err(Error::InvalidRepresentation(format!(
                                "generator {g}: expected {} entries, got {}",
                                k * k,
                                entries.len()
                            )));
                        }
                        Ok(CMatrix::from_row_iterator(k, k, entries.iter().map(|[re, im]| Complex64::new(*re, *im))))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Pi1Representation::new(presentation.clone(), mats)
            }
        }
    }
}
