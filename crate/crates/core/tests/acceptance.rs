//! Acceptance criteria, one line per criterion.
//!
//! Run with `cargo test -p spincurve --test acceptance -- --nocapture` to see the
//! report.

use spincurve::verify::{run_all, DEFAULT_SEED};

#[test]
fn acceptance() {
    let reports = run_all(DEFAULT_SEED);
    for r in &reports {
        println!("{r}");
    }
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

// Independent oracles: none of these go through the verify module.

use nalgebra::{Matrix3, Vector3};
use spincurve::bruhat::{enumerate_b_plus, SignedPermutation};
use spincurve::curves::{families, Grid};
use spincurve::frames_ode::{integrate_frame, ConstantGenerator, FrameCurve4};
use spincurve::spin_algebra::{pi3, UnitQuaternion};
use spincurve::surgery::{relaxation_cell, relaxation_columns};

fn rodrigues(z: &UnitQuaternion) -> Matrix3<f64> {
    let q = z.quaternion();
    let v = Vector3::new(q.b, q.c, q.d);
    let x = v.cross_matrix();
    Matrix3::identity() + 2.0 * q.a * x + 2.0 * x * x
}

#[test]
fn oracle_pi3_matches_rodrigues() {
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let s = k as f64;
        let z = UnitQuaternion::normalize(spincurve::spin_algebra::Quaternion::new(
            (0.3 * s).sin(),
            (1.7 * s + 0.2).cos(),
            (2.3 * s).sin() + 0.1,
            (0.9 * s).cos(),
        ))
        .unwrap();
        worst = worst.max((pi3(&z) - rodrigues(&z)).abs().max());
    }
    println!("oracle pi3 vs Rodrigues: {worst:.1e}");
    assert!(worst <= 1e-12);
}

#[test]
fn oracle_constant_frame_is_matrix_exponential() {
    for m in [1.0, 2.0, 4.0] {
        let lambda = families::gamma_family_lambda(m);
        let f: FrameCurve4 = integrate_frame(&ConstantGenerator(lambda), Grid::new(2048).unwrap());
        let err = (f.final_frame() - lambda.exp()).abs().max();
        println!("oracle exp(Λ) for m = {m}: {err:.1e}");
        assert!(err <= 1e-8);
    }
}

#[test]
fn oracle_hyperoctahedral_counts() {
    // |B⁺_{n+1}| = 2ⁿ (n+1)!
    assert_eq!(enumerate_b_plus(2).unwrap().len(), 4 * 6);
    assert_eq!(enumerate_b_plus(3).unwrap().len(), 8 * 24);
}

#[test]
fn oracle_relaxation_cell_matches_printed_value() {
    let printed = SignedPermutation::new(vec![3, 2, 1, 0], vec![1, -1, 1, -1]).unwrap();
    assert_eq!(relaxation_cell(), printed);
    assert_eq!(printed.inv_count(), 6);
    for (eps, delta) in [(0.05, 0.01), (0.1, 0.1), (0.2, 0.3)] {
        let cols = relaxation_columns(eps, delta);
        let lead: Vec<f64> = (0..4).map(|j| cols[(3 - j, j)]).collect();
        let signs: Vec<f64> = lead.iter().map(|x| x.signum()).collect();
        assert_eq!(
            signs,
            vec![1.0, -1.0, 1.0, -1.0],
            "eps {eps} delta {delta}: {lead:?}"
        );
    }
}
