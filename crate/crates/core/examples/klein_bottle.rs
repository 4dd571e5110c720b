//! A two-dimensional irreducible representation of the Klein bottle group:
//! relations, inequivalence to sums of characters, and its spectrum next to
//! the orientation double cover.

use std::f64::consts::PI;

use num_complex::Complex64;

use lr_quantum::homotopy::{HomotopyClass, Pi1Presentation, Pi1Representation};
use lr_quantum::linalg::CMatrix;
use lr_quantum::manifold::{make_manifold, ManifoldSpec};
use lr_quantum::representations::{build_space, check_equivalence};
use lr_quantum::spectra::{spectrum, SpectrumOptions};

fn main() -> lr_quantum::Result<()> {
    let phi = PI / 3.0;
    let (z, one) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let a = CMatrix::from_row_slice(2, 2, &[Complex64::from_polar(1.0, phi), z, z, Complex64::from_polar(1.0, -phi)]);
    let b = CMatrix::from_row_slice(2, 2, &[z, one, one, z]);
    let r = Pi1Representation::new(Pi1Presentation::klein_bottle(), vec![a, b])?;
    let rel = &r.presentation.relations[0];
    println!("relation residual {:.1e}", r.relation_residual(rel));

    let k = make_manifold(ManifoldSpec::KleinBottle { lengths: [1.0, 1.0] })?;
    let s = build_space(&k, r, &[24, 24])?;
    let classes: Vec<HomotopyClass> =
        [[1, 0], [0, 1], [1, 1], [2, 0]].iter().map(|e| HomotopyClass { exponents: e.to_vec() }).collect();
    let chars = Pi1Representation::from_angles(Pi1Presentation::klein_bottle(), &[PI, 0.5])?;
    let sum = chars.direct_sum(&Pi1Representation::from_angles(Pi1Presentation::klein_bottle(), &[0.0, 2.0])?)?;
    let rpt = check_equivalence(&s, &s.with_rep(sum)?, &classes)?;
    println!("against a sum of characters: {:?} (trace gap {:.2})", rpt.verdict, rpt.max_trace_difference);

    let e = spectrum(&s, None, 6, &SpectrumOptions::default())?;
    let cover = make_manifold(ManifoldSpec::Torus { lengths: [1.0, 2.0] })?;
    let sc = build_space(&cover, Pi1Representation::from_angles(Pi1Presentation::z2(), &[phi, 0.0])?, &[24, 48])?;
    let ec = spectrum(&sc, None, 6, &SpectrumOptions::default())?;
    for (x, y) in e.eigenvalues.iter().zip(&ec.eigenvalues) {
        println!("  klein {x:10.5}   cover {y:10.5}");
    }
    Ok(())
}
