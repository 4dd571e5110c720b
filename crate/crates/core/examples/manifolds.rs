//! The built-in manifolds, their fundamental domains and deck actions.

use lr_quantum::homotopy::HomotopyClass;
use lr_quantum::manifold::{make_grid, make_manifold, ManifoldSpec};

fn main() -> lr_quantum::Result<()> {
    let specs = [
        ManifoldSpec::Line { half_width: 5.0 },
        ManifoldSpec::Circle { length: 1.0 },
        ManifoldSpec::Torus { lengths: [1.0, 2.0] },
        ManifoldSpec::Annulus { length: 1.0, width: 0.5 },
        ManifoldSpec::KleinBottle { lengths: [1.0, 1.0] },
    ];
    for spec in specs {
        let m = make_manifold(spec)?;
        let g = make_grid(&m, &vec![16; m.dim()])?;
        println!(
            "{spec}: dim {}, pi1 generators {:?}, volume {:.3}, grid weight {:.3}",
            m.dim(),
            m.presentation().generators,
            m.volume(),
            g.total_weight()
        );
    }

    // on the Klein bottle b flips the first axis
    let k = make_manifold(ManifoldSpec::KleinBottle { lengths: [1.0, 1.0] })?;
    let b = HomotopyClass { exponents: vec![0, 1] };
    let x = [0.25, 0.5];
    let y = k.deck_action(&b, &x);
    println!("b . {x:?} = {y:?}");
    let (sheet, back) = k.reduce_point(&y);
    println!("reduced: sheet {:?}, point {back:?}", sheet.exponents);
    Ok(())
}
