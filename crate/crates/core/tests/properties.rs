//! Randomized invariants of the operators, twisted spaces and spectra.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use lr_quantum::field::{ScalarField, VectorField};
use lr_quantum::flows::{FlowMap, FlowWord};
use lr_quantum::homotopy::{Pi1Presentation, Pi1Representation};
use lr_quantum::linalg::norms::spectral_norm;
use lr_quantum::linalg::{CMatrix, LinOp};
use lr_quantum::manifold::{make_grid, make_manifold, Manifold, ManifoldSpec, SubBox};
use lr_quantum::operators::{local_commutation, momentum_op, resolvent, unitary};
use lr_quantum::representations::{build_space, compare_locally, rep_momentum, rep_mult};
use lr_quantum::spectra::{spectrum, SpectrumOptions};
use lr_quantum::transport::transport_op;

fn circle() -> Manifold {
    make_manifold(ManifoldSpec::Circle { length: 2.0 * PI }).unwrap()
}

fn theta(t: f64) -> Pi1Representation {
    Pi1Representation::from_angles(Pi1Presentation::integers(), &[t]).unwrap()
}

/// `a + b sin(x) + c cos(k x)`.
fn trig(a: f64, b: f64, c: f64, k: u32) -> String {
    format!("{a} + {b}*sin(x) + {c}*cos({k}*x)")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn momenta_are_hermitian_and_exponentials_unitary(
        a in -2.0f64..2.0, b in -1.0f64..1.0, c in -1.0f64..1.0, k in 1u32..4, lam in -3.0f64..3.0,
    ) {
        let m = circle();
        let g = make_grid(&m, &[48]).unwrap();
        let v = VectorField::parse(&m, &[&trig(a, b, c, k)], None).unwrap();
        let t = momentum_op(&g, &v).unwrap();
        prop_assert!(t.hermiticity_residual() <= 1e-12);
        prop_assert!(unitary(&t, lam).unwrap().unitarity_residual() <= 1e-10);
    }

    #[test]
    fn resolvents_are_contractions(a in -2.0f64..2.0, b in -1.0f64..1.0, c in -1.0f64..1.0, k in 1u32..4) {
        let m = circle();
        let g = make_grid(&m, &[40]).unwrap();
        let v = VectorField::parse(&m, &[&trig(a, b, c, k)], None).unwrap();
        let r = resolvent(&momentum_op(&g, &v).unwrap()).unwrap();
        prop_assert!(spectral_norm(&r) <= 1.0 + 1e-12);
    }

    #[test]
    fn trivial_rep_reproduces_the_untwisted_operators(a in -2.0f64..2.0, b in -1.0f64..1.0, k in 1u32..4) {
        let m = circle();
        let s = build_space(&m, theta(0.0), &[32]).unwrap();
        let v = VectorField::parse(&m, &[&trig(a, b, 0.3, k)], None).unwrap();
        let f = ScalarField::parse(&m, &trig(b, a, 1.0, k), None).unwrap();
        prop_assert_eq!(rep_momentum(&s, &v).unwrap().to_dense(), momentum_op(s.grid(), &v).unwrap().to_dense());
        prop_assert_eq!(rep_mult(&s, &f).unwrap().to_dense(), lr_quantum::operators::mult_op(s.grid(), &f).unwrap().to_dense());
    }

    #[test]
    fn null_homotopic_words_transport_trivially(t in 0.0f64..6.28, lam in 0.5f64..9.0, speed in 0.5f64..3.0) {
        let m = circle();
        let s = build_space(&m, theta(t), &[64]).unwrap();
        let v = VectorField::parse(&m, &["1"], None).unwrap();
        let w = VectorField::parse(&m, &[&speed.to_string()], None).unwrap();
        let g = FlowWord::new(vec![FlowMap::new(&v, lam, 256).unwrap(), FlowMap::new(&w, -lam / speed, 256).unwrap()]);
        let u = transport_op(&s, &g).unwrap();
        prop_assert!(spectral_norm(&u.sub(&LinOp::identity(64)).unwrap()) <= 1e-5);
    }

    #[test]
    fn interior_boxes_do_not_see_the_twist(t in 0.0f64..6.28, lo in 0.6f64..3.0, width in 0.8f64..2.5) {
        let s = build_space(&circle(), theta(t), &[96]).unwrap();
        let b = SubBox::new(vec![lo], vec![lo + width]).unwrap();
        prop_assert!(compare_locally(&s, &b).unwrap().max() <= 1e-12);
    }

    #[test]
    fn nonnegative_potentials_raise_every_level(t in 0.0f64..6.28, amp in 0.0f64..3.0, k in 1u32..4) {
        let m = circle();
        let s = build_space(&m, theta(t), &[64]).unwrap();
        let v = ScalarField::parse(&m, &format!("{amp}*(1 + cos({k}*x))"), None).unwrap();
        let opts = SpectrumOptions::default();
        let free = spectrum(&s, None, 5, &opts).unwrap().eigenvalues;
        let pot = spectrum(&s, Some(&v), 5, &opts).unwrap().eigenvalues;
        for (a, b) in free.iter().zip(&pot) {
            prop_assert!(b >= &(a - 1e-10));
        }
    }

    #[test]
    fn conjugate_reps_share_spectra(t1 in 0.0f64..6.28, t2 in 0.0f64..6.28, u1 in 0.0f64..6.28, rot in 0.0f64..3.14) {
        let m = make_manifold(ManifoldSpec::Torus { lengths: [1.0, 1.0] }).unwrap();
        let z = Complex64::new(0.0, 0.0);
        let d = |x: f64, y: f64| CMatrix::from_row_slice(2, 2, &[Complex64::from_polar(1.0, x), z, z, Complex64::from_polar(1.0, y)]);
        let r = Pi1Representation::new(Pi1Presentation::z2(), vec![d(t1, t2), d(u1, -t1)]).unwrap();
        let (c, sn) = (rot.cos(), rot.sin());
        let q = CMatrix::from_row_slice(2, 2, &[Complex64::new(c, 0.0), Complex64::new(0.0, sn), Complex64::new(0.0, sn), Complex64::new(c, 0.0)]);
        let s1 = build_space(&m, r.clone(), &[10, 10]).unwrap();
        let s2 = s1.with_rep(r.conjugated(&q).unwrap()).unwrap();
        let e1 = spectrum(&s1, None, 6, &SpectrumOptions::default()).unwrap().eigenvalues;
        let e2 = spectrum(&s2, None, 6, &SpectrumOptions::default()).unwrap().eigenvalues;
        for (a, b) in e1.iter().zip(&e2) {
            prop_assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn local_cartesian_commutation_vanishes_under_refinement() {
    let m = make_manifold(ManifoldSpec::Torus { lengths: [1.0, 1.0] }).unwrap();
    // coordinate fields away from a strip that the flows never carry supp α into
    let v1 = VectorField::parse(&m, &["1 + 0.5*bump((y-0.15)/0.1)", "0"], None).unwrap();
    let v2 = VectorField::parse(&m, &["0", "1 + 0.5*bump((x-0.15)/0.1)"], None).unwrap();
    let alpha = ScalarField::parse(&m, "bump((x-0.55)/0.12)*bump((y-0.55)/0.12)", None).unwrap();
    let g1 = FlowWord::single(FlowMap::new(&v1, 0.13, 128).unwrap());
    let g2 = FlowWord::single(FlowMap::new(&v2, 0.07, 128).unwrap());
    let r: Vec<f64> = [24, 48]
        .iter()
        .map(|&n| local_commutation(&make_grid(&m, &[n, n]).unwrap(), &g1, &g2, &alpha).unwrap().residual)
        .collect();
    // axis-wise interpolation of axis-wise shifts commutes to rounding
    assert!(r[1] <= 1e-12 || r[1] < r[0] / 4.0, "{r:?}");
}
