//! Low spectrum of the free particle on a circle for a sweep of twist angles.

use std::f64::consts::PI;

use lr_quantum::homotopy::{Pi1Presentation, Pi1Representation};
use lr_quantum::manifold::{make_manifold, ManifoldSpec};
use lr_quantum::spectra::{theta_sweep, SpectrumOptions};

fn main() -> lr_quantum::Result<()> {
    let m = make_manifold(ManifoldSpec::Circle { length: 2.0 * PI })?;
    let thetas: Vec<f64> = (0..=8).map(|i| i as f64 * PI / 4.0).collect();
    let reps = thetas
        .iter()
        .map(|&t| Pi1Representation::from_angles(Pi1Presentation::integers(), &[t]))
        .collect::<lr_quantum::Result<Vec<_>>>()?;
    let out = theta_sweep(&m, &reps, &[512], 4, None, &SpectrumOptions::default());
    println!("theta/pi   E0        E1        E2        E3      degeneracies");
    for (t, r) in thetas.iter().zip(out) {
        let r = r?;
        let e: Vec<String> = r.eigenvalues.iter().map(|e| format!("{e:.5}")).collect();
        println!("{:7.2}   {}  {:?}", t / PI, e.join("  "), r.degeneracies());
    }
    Ok(())
}
