//! Flow maps of vector fields, their Jacobians and the classes of the paths
//! they trace.

use lr_quantum::field::VectorField;
use lr_quantum::flows::{flow, jacobian_factor};
use lr_quantum::manifold::{make_manifold, ManifoldSpec};

fn main() -> lr_quantum::Result<()> {
    let m = make_manifold(ManifoldSpec::Circle { length: 1.0 })?;
    let v = VectorField::parse(&m, &["1 + 0.5*sin(2*pi*x)"], None)?;
    for lambda in [0.25, 1.0, 3.0, -2.0] {
        let p = flow(&v, lambda, &[0.1], 256)?;
        let j = jacobian_factor(&v, lambda, &[0.1], 256)?;
        println!(
            "lambda {lambda:5}: cover {:8.4}, point {:.4}, winding {:?}, J {j:.4}",
            p.cover[0], p.point[0], p.class.exponents
        );
    }

    // a Klein bottle path across the b edge comes back mirrored
    let k = make_manifold(ManifoldSpec::KleinBottle { lengths: [1.0, 1.0] })?;
    let up = VectorField::parse(&k, &["0", "1"], None)?;
    let p = flow(&up, 1.0, &[0.3, 0.2], 128)?;
    println!("klein: {:?} -> {:?}, class {:?}", [0.3, 0.2], p.point, p.class.exponents);
    Ok(())
}
