//! Invariants that cut across modules.

use std::f64::consts::PI;

use proptest::prelude::*;

use tqft_volume::angle_opt::{maximize_volume, volume_functional, AnglePolytope, OptimizerConfig};
use tqft_volume::complex_geometry::{
    gluing_residual, psi, psi_inv, shapes_from_angles, solve_gluing, ComplexShape, SIGNS_73,
};
use tqft_volume::specfun::{bloch_wigner, lobachevsky};
use tqft_volume::triangulation::{builtin_ideal_73, is_angle_structure, lambda_mu, ShapeStructure, TetShape};
use tqft_volume::{C64, VOL_7_3};

fn tet() -> impl Strategy<Value = TetShape> {
    (0.001f64..0.499, 0.001f64..0.999).prop_map(|(a, u)| {
        let b = (0.5 - a) * u;
        TetShape::new(a, b, 0.5 - a - b)
    })
}

/// Interior angle structures of the ideal triangulation, reached along random chords.
fn interior_structure() -> impl Strategy<Value = ShapeStructure> {
    (proptest::collection::vec(-1.0f64..1.0, 15), 0.0f64..0.95).prop_map(|(u, s)| {
        let t = builtin_ideal_73();
        let poly = AnglePolytope::new(&t, |e| t.default_target(e)).unwrap();
        let x0 = poly.interior_point().unwrap();
        let d = poly.direction(&u[..poly.dim()]);
        let step = s * poly.ray_limit(&x0, &d);
        ShapeStructure::from_flat(&x0.iter().zip(&d).map(|(a, b)| a + step * b).collect::<Vec<_>>())
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    // the shape with dihedral angles 2π(a, b, c) has volume Λ(2πa) + Λ(2πb) + Λ(2πc)
    #[test]
    fn bloch_wigner_of_shape_is_sum_of_lobachevsky(s in tet()) {
        let z = shapes_from_angles(&ShapeStructure::new(vec![s]), &[1]).unwrap()[0];
        let lob = lobachevsky(2.0 * PI * s.a) + lobachevsky(2.0 * PI * s.b) + lobachevsky(2.0 * PI * s.c);
        prop_assert!((z.volume() - lob).abs() < 1e-12);
        let zp = ComplexShape::new(z.z_prime()).unwrap();
        // z′ sits at the vertex 1 of the triangle (0, 1, z), where the angle is c
        prop_assert!((zp.z.arg() - 2.0 * PI * s.c).abs() < 1e-12);
        prop_assert!((z.z_dprime().arg() - 2.0 * PI * s.b).abs() < 1e-12);
    }

    #[test]
    fn psi_round_trip(re in proptest::collection::vec(-2.0f64..2.0, 3), im in proptest::collection::vec(0.01f64..3.1, 3)) {
        let z: [ComplexShape; 3] = std::array::from_fn(|k| ComplexShape::new(C64::from_polar(re[k].exp(), im[k])).unwrap());
        let back = psi_inv(&psi(&z, SIGNS_73), SIGNS_73).unwrap();
        for k in 0..3 {
            prop_assert!((back[k].z - z[k].z).norm() < 1e-12 * z[k].z.norm());
        }
    }

    #[test]
    fn interior_structures_are_balanced_and_below_the_maximum(alpha in interior_structure()) {
        let t = builtin_ideal_73();
        prop_assert!(is_angle_structure(&t, &alpha, |e| t.default_target(e)));
        prop_assert!(volume_functional(&alpha) <= VOL_7_3 + 1e-9);
        let (l, m) = lambda_mu(&alpha).unwrap();
        prop_assert!(l.is_finite() && m.is_finite());
    }
}

#[test]
fn maximiser_shapes_already_solve_the_gluing_equations() {
    let alpha = maximize_volume(&builtin_ideal_73(), &OptimizerConfig::default()).unwrap();
    let z = shapes_from_angles(&ShapeStructure::new(alpha.shapes[..3].to_vec()), &SIGNS_73).unwrap();
    let z = [z[0], z[1], z[2]];
    assert!(gluing_residual(&z).iter().all(|r| r.norm() < 1e-9));
    let rep = solve_gluing(&alpha).unwrap();
    let bw: f64 = z[0].volume() + z[1].volume() + 3.0 * z[2].volume();
    assert!((bw - rep.volume).abs() < 1e-9);
    assert!((bloch_wigner(rep.z0[4]) - bloch_wigner(rep.z0[2])).abs() < 1e-12);
}
