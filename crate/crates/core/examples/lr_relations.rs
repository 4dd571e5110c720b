//! The defining relations of the observable algebra as convergent residuals.

use lr_quantum::field::{ScalarField, VectorField};
use lr_quantum::flows::{FlowMap, FlowWord};
use lr_quantum::manifold::{make_grid, make_manifold, ManifoldSpec};
use lr_quantum::operators::{check_resolvent_identities, convergence_ratio, covariance_residuals, lie_residual, lr_residual};

fn main() -> lr_quantum::Result<()> {
    let m = make_manifold(ManifoldSpec::Circle { length: 2.0 * std::f64::consts::PI })?;
    let f = ScalarField::parse(&m, "sin(x)", None)?;
    let v = VectorField::parse(&m, &["cos(x)"], None)?;
    let w = VectorField::parse(&m, &["1 + 0.5*sin(x)"], None)?;

    println!("LR relation");
    let mut prev = None;
    for n in [64, 128, 256, 512] {
        let r = lr_residual(&make_grid(&m, &[n])?, &f, &v)?;
        let ratio = prev.as_ref().map(|p| convergence_ratio(p, &r));
        println!("  n {n:4}: {:.3e} ratio {ratio:.2?}", r.residual);
        prev = Some(r);
    }

    println!("Lie relation");
    for n in [64, 128, 256] {
        println!("  n {n:4}: {:.3e}", lie_residual(&make_grid(&m, &[n])?, &v, &w)?.residual);
    }

    println!("resolvent identities at n = 64");
    for r in check_resolvent_identities(&make_grid(&m, &[64])?, &w)? {
        println!("  {:22} {:?} {:.3e}", r.check, r.params.get("lambda"), r.residual);
    }

    let g = FlowWord::single(FlowMap::new(&VectorField::parse(&m, &["bump((x-3)/1.5)"], None)?, 0.7, 256)?);
    let bump = ScalarField::parse(&m, "bump((x-3)/1.2)", None)?;
    println!("covariance");
    for n in [64, 128, 256] {
        let r = covariance_residuals(&make_grid(&m, &[n])?, &g, &bump, &w)?;
        println!("  n {n:4}: function {:.3e}, resolvent {:.3e}", r[0].residual, r[1].residual);
    }
    Ok(())
}
