//! Finite-difference stencils and their twisted assembly on a representation
//! space.
//!
//! A stencil tap at lattice offset `o` from node `p` reads the cover node
//! `p + o e_axis`. That node is reduced to a domain node `q` on sheet `u`,
//! and since twisted states satisfy `ψ(u·q) = R(u) ψ(q)` the tap contributes
//! the fiber block `c R(u) / h` to entry `(p, q)`. Taps falling off a
//! truncated axis are dropped.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::{CMatrix, HomotopyClass};
use crate::linalg::{LinOp, OpFlag};
use crate::representations::RepSpace;

/// Accuracy order of a difference stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(try_from = "u8", into = "u8")]
pub enum Order {
    #[default]
    Two,
    Four,
}

impl TryFrom<u8> for Order {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            2 => Ok(Order::Two),
            4 => Ok(Order::Four),
            _ => Err(Error::InvalidParam(format!("stencil order must be 2 or 4, got {v}"))),
        }
    }
}

impl From<Order> for u8 {
    fn from(o: Order) -> u8 {
        match o {
            Order::Two => 2,
            Order::Four => 4,
        }
    }
}

/// Taps `(offset, coefficient)` in units of `1/h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub taps: Vec<(i64, f64)>,
}

impl Stencil {
    /// Antisymmetric central first difference.
    pub fn central(order: Order) -> Self {
        let taps = match order {
            Order::Two => vec![(-1, -0.5), (1, 0.5)],
            Order::Four => vec![(-2, 1.0 / 12.0), (-1, -2.0 / 3.0), (1, 2.0 / 3.0), (2, -1.0 / 12.0)],
        };
        Stencil { taps }
    }

    /// First difference evaluated half a step forward of the node.
    pub fn staggered(order: Order) -> Self {
        let taps = match order {
            Order::Two => vec![(0, -1.0), (1, 1.0)],
            Order::Four => vec![(-1, 1.0 / 24.0), (0, -27.0 / 24.0), (1, 27.0 / 24.0), (2, -1.0 / 24.0)],
        };
        Stencil { taps }
    }

    pub fn reach(&self) -> i64 {
        self.taps.iter().map(|(o, _)| o.abs()).max().unwrap_or(0)
    }
}

/// Twisted difference operator along `axis` as triplets of fiber blocks.
pub fn difference_blocks(space: &RepSpace, axis: usize, stencil: &Stencil) -> Vec<(usize, usize, Complex64)> {
    let grid = space.grid();
    let k = space.fiber_dim();
    let h = grid.h()[axis];
    let mut cache: HashMap<HomotopyClass, CMatrix> = HashMap::new();
    let mut t = Vec::with_capacity(grid.len() * stencil.taps.len() * k * k);
    for p in 0..grid.len() {
        let base: Vec<i64> = grid.multi(p).iter().map(|&i| i as i64).collect();
        for &(off, c) in &stencil.taps {
            let mut idx = base.clone();
            idx[axis] += off;
            let Some((u, q)) = grid.reduce_node(&idx) else { continue };
            let r = cache.entry(u).or_insert_with_key(|u| space.rep().evaluate(u));
            for a in 0..k {
                for b in 0..k {
                    let v = r[(a, b)];
                    if v != Complex64::new(0.0, 0.0) {
                        t.push((p * k + a, q * k + b, v * (c / h)));
                    }
                }
            }
        }
    }
    t
}

pub fn difference_op(space: &RepSpace, axis: usize, stencil: &Stencil) -> LinOp {
    LinOp::from_triplets(space.dim(), &difference_blocks(space, axis, stencil), OpFlag::General)
}
