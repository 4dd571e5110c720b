//! Smooth, localized test states used to measure consistency residuals.
//!
//! Difference operators only approximate their continuum counterparts on
//! resolved states, so residuals of operator identities are measured on the
//! span of a fixed family of bump wave packets rather than over the whole
//! grid space.

use num_complex::Complex64;

use crate::field::bump;
use crate::linalg::norms::orthonormalize;
use crate::linalg::CMatrix;
use crate::manifold::SubBox;
use crate::representations::RepSpace;

const CENTERS: [f64; 3] = [0.25, 0.5, 0.75];
const MODES: [i32; 5] = [0, 1, -1, 2, -2];

/// Default probing region: the domain, pulled in by a tenth on truncated axes.
pub fn default_region(space: &RepSpace) -> SubBox {
    let m = space.grid().manifold();
    let (mut lo, mut hi) = (m.lo().to_vec(), m.hi().to_vec());
    for a in 0..m.dim() {
        if !m.is_periodic(a) {
            let pad = 0.1 * m.length(a);
            lo[a] += pad;
            hi[a] -= pad;
        }
    }
    SubBox { lo, hi }
}

/// Scalar packets `Π bump((x_a - c_a)/w_a) e^{i k·x}` in `region`, one per
/// center and mode, as grid vectors.
pub fn packets(space: &RepSpace, region: &SubBox) -> Vec<Vec<Complex64>> {
    let grid = space.grid();
    let d = grid.dim();
    let width: Vec<f64> = (0..d).map(|a| region.hi[a] - region.lo[a]).collect();
    let mut centers: Vec<Vec<f64>> = vec![vec![]];
    for a in 0..d {
        let (lo, wa) = (region.lo[a], width[a]);
        centers = centers
            .into_iter()
            .flat_map(|c| CENTERS.iter().map(move |f| [c.clone(), vec![lo + f * wa]].concat()))
            .collect();
    }
    let mut modes: Vec<Vec<i32>> = Vec::new();
    for &m in &MODES {
        for a in 0..d {
            if m == 0 && a > 0 {
                continue;
            }
            let mut k = vec![0; d];
            k[a] = m;
            if d == 1 || m.abs() <= 1 {
                modes.push(k);
            }
        }
    }
    let points = grid.points();
    let mut out = Vec::new();
    for c in &centers {
        for k in &modes {
            let v = points
                .iter()
                .map(|x| {
                    let mut amp = 1.0;
                    let mut phase = 0.0;
                    for a in 0..d {
                        amp *= bump((x[a] - c[a]) / (0.2 * width[a]));
                        phase += 2.0 * std::f64::consts::PI * k[a] as f64 * (x[a] - region.lo[a]) / width[a];
                    }
                    Complex64::from_polar(amp, phase)
                })
                .collect();
            out.push(v);
        }
    }
    out
}

/// Orthonormal probe matrix: packets tensored with every fiber basis vector.
pub fn probe_states(space: &RepSpace, region: &SubBox) -> CMatrix {
    let k = space.fiber_dim();
    let scalar = packets(space, region);
    let mut m = CMatrix::zeros(space.dim(), scalar.len() * k);
    for (j, v) in scalar.iter().enumerate() {
        for f in 0..k {
            for (p, z) in v.iter().enumerate() {
                m[(p * k + f, j * k + f)] = *z;
            }
        }
    }
    orthonormalize(m)
}
