//! Flow unitaries by transport along integral curves.
//!
//! `(Uψ)(x) = J(g, x) ψ̃(g⁻¹x)` is evaluated on the universal cover: the
//! backward endpoint is interpolated from the sixteen (or four) surrounding
//! cover nodes, each of which is reduced to a domain node and carries the
//! twist of its sheet. The fiber factor `V_g` is the twist of the sheet the
//! backward orbit ends on.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::Result;
use crate::flows::FlowWord;
use crate::homotopy::{CMatrix, HomotopyClass};
use crate::linalg::{LinOp, OpFlag};
use crate::representations::RepSpace;

/// Four-point Lagrange weights for nodes `-1, 0, 1, 2` at fraction `s`.
pub fn cubic_weights(s: f64) -> [f64; 4] {
    [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ]
}

/// Bound on the cubic interpolation error per unit of `max |∂⁴ψ|` along one
/// axis: `(9/16) h⁴ / 24`.
pub fn interpolation_constant(h: f64) -> f64 {
    9.0 / 16.0 * h.powi(4) / 24.0
}

// Fractions this close to a node are snapped so exact shifts stay exact.
const SNAP: f64 = 1e-9;

fn axis_taps(t: f64) -> Vec<(i64, f64)> {
    let near = t.round();
    if (t - near).abs() <= SNAP {
        return vec![(near as i64, 1.0)];
    }
    let base = t.floor();
    let w = cubic_weights(t - base);
    (0..4).map(|j| (base as i64 - 1 + j as i64, w[j])).collect()
}

pub fn transport_op(space: &RepSpace, g: &FlowWord) -> Result<LinOp> {
    let grid = space.grid();
    let k = space.fiber_dim();
    let d = grid.dim();
    let mut cache: HashMap<HomotopyClass, CMatrix> = HashMap::new();
    let mut t = Vec::new();
    for p in 0..grid.len() {
        let (y, logdet) = g.backward_with_log_det(&grid.point(p))?;
        let jac = (0.5 * logdet).exp();
        let lat = grid.lattice_coords(&y);
        let taps: Vec<Vec<(i64, f64)>> = lat.iter().map(|&c| axis_taps(c)).collect();
        let mut counter = vec![0usize; d];
        'outer: loop {
            let mut idx = Vec::with_capacity(d);
            let mut w = jac;
            for a in 0..d {
                let (i, wa) = taps[a][counter[a]];
                idx.push(i);
                w *= wa;
            }
            if let Some((u, q)) = grid.reduce_node(&idx) {
                let r = cache.entry(u).or_insert_with_key(|u| space.rep().evaluate(u));
                for a in 0..k {
                    for b in 0..k {
                        let v = r[(a, b)];
                        if v != Complex64::new(0.0, 0.0) {
                            t.push((p * k + a, q * k + b, v * w));
                        }
                    }
                }
            }
            for a in 0..d {
                counter[a] += 1;
                if counter[a] < taps[a].len() {
                    continue 'outer;
                }
                counter[a] = 0;
            }
            break;
        }
    }
    Ok(LinOp::from_triplets(space.dim(), &t, OpFlag::General))
}

/// Sheet reached by the backward orbit of `x`, relative to the sheet of `x`.
pub fn backward_class(space: &RepSpace, g: &FlowWord, x: &[f64]) -> Result<HomotopyClass> {
    let m = space.grid().manifold();
    let (start, _) = m.reduce_point(x);
    let (end, _) = m.reduce_point(&g.backward(x)?);
    let p = m.presentation();
    Ok(p.compose(&p.inverse(&start), &end))
}

/// Fiber factor of the transport at the image point `x`.
pub fn fiber_factor_at(space: &RepSpace, g: &FlowWord, x: &[f64]) -> Result<CMatrix> {
    Ok(space.rep().evaluate(&backward_class(space, g, x)?))
}

/// `V_g(y)`: the fiber factor the transport applies at `g y`.
pub fn cocycle_value(space: &RepSpace, g: &FlowWord, y: &[f64]) -> Result<CMatrix> {
    let m = space.grid().manifold();
    let (_, x) = m.reduce_point(&g.forward(y)?);
    fiber_factor_at(space, g, &x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_weights_reproduce_cubics() {
        for s in [0.0, 0.25, 0.5, 0.9] {
            let w = cubic_weights(s);
            for pow in 0..4 {
                let interp: f64 = (0..4).map(|j| w[j] * ((j as f64) - 1.0).powi(pow)).sum();
                assert!((interp - s.powi(pow)).abs() < 1e-14);
            }
        }
        assert_eq!(cubic_weights(0.0), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn near_nodes_are_snapped() {
        assert_eq!(axis_taps(3.0 + 1e-12), vec![(3, 1.0)]);
        assert_eq!(axis_taps(-2.0 - 1e-12), vec![(-2, 1.0)]);
        assert_eq!(axis_taps(3.5).len(), 4);
    }
}
