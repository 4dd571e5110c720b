//! Expressions, exact derivatives and Lie brackets of vector fields.

use lr_quantum::field::{lie_bracket, parse, ScalarField, VectorField};
use lr_quantum::manifold::{make_manifold, ManifoldSpec};

fn main() -> lr_quantum::Result<()> {
    let e = parse("x^2*sin(y) + bump((x-0.5)/0.2)")?;
    println!("f        = {e}");
    println!("df/dx    = {}", e.derivative(0));
    println!("df/dy    = {}", e.derivative(1));
    println!("f(0.5,1) = {}", e.eval(&[0.5, 1.0])?);

    let m = make_manifold(ManifoldSpec::Torus { lengths: [6.283185307179586, 6.283185307179586] })?;
    let v = VectorField::parse(&m, &["sin(y)", "1"], None)?;
    let w = VectorField::parse(&m, &["1", "cos(x)"], None)?;
    let b = lie_bracket(&v, &w)?;
    println!("[v, w]   = ({}, {})", b.components()[0], b.components()[1]);
    println!("div v    = {}", v.divergence());

    // functions are validated against the gluing of the domain
    match ScalarField::parse(&m, "x", None) {
        Ok(_) => println!("x accepted"),
        Err(err) => println!("x rejected: {err}"),
    }
    Ok(())
}
