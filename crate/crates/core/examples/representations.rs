//! Unitary representations of the fundamental group and the operators they
//! twist: momentum spectrum shifts, full-loop holonomy, cocycles.

use std::f64::consts::PI;

use lr_quantum::field::VectorField;
use lr_quantum::flows::{FlowMap, FlowWord};
use lr_quantum::homotopy::{Pi1Presentation, Pi1Representation};
use lr_quantum::linalg::eigen::dense_eigenvalues;
use lr_quantum::manifold::{make_manifold, ManifoldSpec};
use lr_quantum::representations::{build_space, check_cocycle, rep_momentum, rep_transport};

fn main() -> lr_quantum::Result<()> {
    let m = make_manifold(ManifoldSpec::Circle { length: 2.0 * PI })?;
    let theta = 1.0;
    let s = build_space(&m, Pi1Representation::from_angles(Pi1Presentation::integers(), &[theta])?, &[256])?;
    let one = VectorField::parse(&m, &["1"], None)?;

    // central differences also carry a mirrored branch from the zone edge, so
    // match each expected level to its nearest eigenvalue
    let ev = dense_eigenvalues(&rep_momentum(&s, &one)?.to_dense());
    for n in -1..=1 {
        let want = n as f64 + theta / (2.0 * PI);
        let got = ev.iter().copied().min_by(|a, b| (a - want).abs().total_cmp(&(b - want).abs())).unwrap_or(f64::NAN);
        println!("n {n:2}: n + theta/2pi = {want:.6}, nearest eigenvalue {got:.6}");
    }

    // going once around multiplies by a phase
    let u = rep_transport(&s, &one, 2.0 * PI, 256)?;
    println!("full loop: {:.6}, e^(-i theta) = {:.6}", u.entry(0, 0), num_complex::Complex64::from_polar(1.0, -theta));

    let g = FlowWord::single(FlowMap::new(&one, 4.0, 256)?);
    let h = FlowWord::single(FlowMap::new(&VectorField::parse(&m, &["1 + 0.5*sin(x)"], None)?, 3.0, 256)?);
    let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![0.6 * i as f64]).collect();
    println!("cocycle residual: {:.2e}", check_cocycle(&s, &g, &h, &pts)?.residual);
    Ok(())
}
