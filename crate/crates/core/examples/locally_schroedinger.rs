//! Inside a coordinate box every twisted representation looks the same.

use std::f64::consts::PI;

use lr_quantum::homotopy::{Pi1Presentation, Pi1Representation};
use lr_quantum::manifold::{make_manifold, ManifoldSpec, SubBox};
use lr_quantum::representations::{build_space, compare_locally};
use lr_quantum::Error;

fn main() -> lr_quantum::Result<()> {
    let m = make_manifold(ManifoldSpec::Torus { lengths: [2.0 * PI, 2.0 * PI] })?;
    let inner = SubBox::new(vec![2.0, 1.5], vec![4.5, 4.0])?;
    for angles in [[0.5, 0.0], [PI, PI], [2.0, 5.0]] {
        let s = build_space(&m, Pi1Representation::from_angles(Pi1Presentation::z2(), &angles)?, &[32, 32])?;
        let c = compare_locally(&s, &inner)?;
        println!("angles {angles:?}: {c:?}");
    }
    let s = build_space(&m, Pi1Representation::from_angles(Pi1Presentation::z2(), &[1.0, 1.0])?, &[32, 32])?;
    match compare_locally(&s, &SubBox::new(vec![0.05, 1.0], vec![3.0, 3.0])?) {
        Err(Error::BoxTouchesEdge(msg)) => println!("edge box refused: {msg}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
