mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use twistguide::cross_section::*;

#[test]
fn unit_square_small_grid_has_nine_nodes() {
    let sq = Shape::Polygon { vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]] };
    let d = CrossSectionDomain::new(sq, 0.25).unwrap();
    assert_eq!(d.len(), 9);
    let k = d.stiffness();
    // aligned boundary: the classical 5-point matrix
    assert_eq!(k.get(4, 4), 4.0 / 0.0625);
    assert_eq!(k.asymmetry(), 0.0);
}

#[test]
fn rectangle_half_step_grid() {
    let d = CrossSectionDomain::new(Shape::rectangle(1.0, 2.0), 0.5).unwrap();
    assert_eq!(d.len(), 3);
    assert!((d.radius() - 1.25f64.sqrt()).abs() < 1e-15);
}

#[test]
fn too_coarse_grid_is_degenerate() {
    let e = CrossSectionDomain::new(Shape::disk(0.1), 0.5).unwrap_err();
    assert!(matches!(e, twistguide::Error::DegenerateDiscretization(_)));
}

#[test]
fn square_ground_energy() {
    let sq = Shape::rectangle(1.0, 1.0);
    let gp = dirichlet_ground_pair(&CrossSectionDomain::new(sq, 0.02).unwrap()).unwrap();
    assert!(common::rel(gp.e1, 2.0 * PI * PI) < 1e-2);
    assert!(gp.ground.iter().all(|&x| x > 0.0));
}

#[test]
fn disk_ground_energy_against_bessel_zero() {
    let j = common::j01();
    assert!((j - 2.404_825_557_695_773).abs() < 1e-14);
    let gp = dirichlet_ground_pair(&CrossSectionDomain::new(Shape::disk(1.0), 0.05).unwrap()).unwrap();
    assert!(common::rel(gp.e1, j * j) < 1e-2, "{}", gp.e1);
}

#[test]
fn rayleigh_quotient_of_ground_state() {
    let d = CrossSectionDomain::new(Shape::Ellipse { semi_axes: [0.6, 0.9], center: [0.1, 0.0] }, 0.05).unwrap();
    let gp = dirichlet_ground_pair(&d).unwrap();
    let k = d.stiffness();
    let kg = k.apply(&gp.ground);
    let rq = d.inner(&gp.ground, &kg) / d.inner(&gp.ground, &gp.ground);
    assert!(common::rel(rq, gp.e1) < 1e-10);
    assert!((d.inner(&gp.ground, &gp.ground) - 1.0).abs() < 1e-12);
}

#[test]
fn tangential_derivative_of_linear_and_radial_functions() {
    let d = CrossSectionDomain::new(Shape::rectangle(1.0, 2.0), 0.1).unwrap();
    let t = d.tangential();
    let pts = d.points();
    let f: Vec<f64> = pts.iter().map(|p| p[0]).collect();
    let g: Vec<f64> = pts.iter().map(|p| p[0] * p[0] + p[1] * p[1]).collect();
    let df = t.apply_nodal(&f);
    let dg = t.apply_nodal(&g);
    for (n, l) in d.links().iter().enumerate() {
        if l.iter().all(|x| x.node().is_some()) {
            assert!((df[n] - pts[n][1]).abs() < 1e-13);
            assert!(dg[n].abs() < 1e-12);
        }
    }
}

#[test]
fn lambda_rectangle_positive_disk_small() {
    let r = compute_lambda(&CrossSectionDomain::new(Shape::rectangle(1.0, 2.0), 0.05).unwrap()).unwrap();
    assert!(r.lambda > 0.5 && r.lambda < 1.0, "{}", r.lambda);
    assert_eq!(r.asymmetry, 0.0);
    let d = compute_lambda(&CrossSectionDomain::new(Shape::disk(1.0), 0.05).unwrap()).unwrap();
    assert!(d.lambda.abs() < 1e-3 * d.e1, "{}", d.lambda);
}

#[test]
fn symmetry_reports() {
    let angles = [PI / 4.0, PI / 2.0, PI];
    let disk = rotational_symmetry_check(&Shape::disk(1.0), &angles, 400);
    assert!(!disk.satisfies_non_symmetry());
    let sq = rotational_symmetry_check(&Shape::rectangle(1.0, 1.0), &angles, 400);
    assert_eq!(sq.witness, Some(PI / 4.0));
    assert!(sq.differences[1] < sq.tolerance);
    let rect = rotational_symmetry_check(&Shape::rectangle(1.0, 2.0), &[PI / 2.0], 400);
    assert!(rect.satisfies_non_symmetry());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stiffness_symmetric_and_ground_positive(w in 0.4f64..1.5, h in 0.4f64..1.5, cx in -0.3f64..0.3, delta in 0.04f64..0.12) {
        let d = CrossSectionDomain::new(Shape::Rectangle { width: w, height: h, center: [cx, 0.0] }, delta).unwrap();
        prop_assert_eq!(d.stiffness().asymmetry(), 0.0);
        let gp = dirichlet_ground_pair(&d).unwrap();
        prop_assert!(gp.ground.iter().all(|&x| x > 0.0));
        let b = lambda_operator(&d, gp.e1);
        prop_assert_eq!(b.asymmetry(), 0.0);
    }

    #[test]
    fn ellipse_nodes_are_interior(a in 0.3f64..1.0, b in 0.3f64..1.0, delta in 0.03f64..0.1) {
        let s = Shape::Ellipse { semi_axes: [a, b], center: [0.0, 0.0] };
        let d = CrossSectionDomain::new(s.clone(), delta).unwrap();
        for p in d.points() {
            prop_assert!(s.contains(*p));
        }
        for l in d.links() {
            for x in l {
                prop_assert!(x.theta() > 0.0 && x.theta() <= 1.0);
            }
        }
    }
}
