//! The simply connected control: a harmonic oscillator on the line.

use lr_quantum::field::{parse, ScalarField};
use lr_quantum::homotopy::Pi1Representation;
use lr_quantum::manifold::{make_manifold, ManifoldSpec};
use lr_quantum::representations::build_space;
use lr_quantum::spectra::{spectrum, SpectrumOptions};
use lr_quantum::stencil::Order;

fn main() -> lr_quantum::Result<()> {
    let m = make_manifold(ManifoldSpec::Line { half_width: 10.0 })?;
    let v = ScalarField::potential(&m, parse("0.5*x^2")?)?;
    let trivial = Pi1Representation::trivial(m.presentation().clone(), 1);
    for order in [Order::Two, Order::Four] {
        let s = build_space(&m, trivial.clone(), &[1024])?;
        let r = spectrum(&s, Some(&v), 6, &SpectrumOptions { order, ..Default::default() })?;
        let err = r.eigenvalues.iter().enumerate().map(|(n, e)| (e - (n as f64 + 0.5)).abs()).fold(0.0, f64::max);
        println!("{order:?}: {:?}  max error {err:.2e}", r.eigenvalues);
    }
    Ok(())
}
