use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistguide::curve_geometry::*;

fn general_profile(ds: f64) -> CurvatureProfile {
    make_profile(ProfileSpec {
        kappa1: vec![Bump::cos2(0.0, 2.0, 0.4), Bump::poly(0.3, 0.8, 0.2)],
        kappa2: vec![Bump::cos2(-0.2, 1.2, 0.7)],
        theta_dot: vec![Bump::cos2(0.4, 1.5, -1.3)],
        interval: Some((-1.0, 1.0)),
        ds,
    })
    .unwrap()
}

#[test]
fn straight_tube_map_is_identity() {
    let p = CurvatureProfile::straight(0.01);
    assert_eq!(p.norms(), ProfileNorms::default());
    let f = integrate_frame(&p, 0.01, (-2.0, 2.0)).unwrap();
    for i in [0, 57, f.len() - 1] {
        let x = f.tube_point(&p, i, [0.3, -0.2]);
        assert!((x[0] - f.s(i)).abs() < 1e-12 && (x[1] - 0.3).abs() < 1e-15 && (x[2] + 0.2).abs() < 1e-15);
    }
    let m = metric_at(&p, 0.3, [0.2, 0.1]).unwrap();
    assert_eq!(m.g, Matrix3::identity());
    assert_eq!(m.grad_f, [0.0; 3]);
}

#[test]
fn straight_twisted_rotates_section() {
    let p = make_profile(ProfileSpec { theta_dot: vec![Bump::cos2(0.0, 1.0, 2.0)], ds: 0.01, ..Default::default() }).unwrap();
    let f = integrate_frame(&p, 0.01, (-1.0, 1.0)).unwrap();
    let i = f.index_at(0.8);
    let th = p.theta(f.s(i));
    let t = [0.3, 0.1];
    let x = f.tube_point(&p, i, t);
    // coefficient of e_nu is t_mu R_{mu nu}
    assert!((x[1] - (t[0] * th.cos() + t[1] * th.sin())).abs() < 1e-14);
    assert!((x[2] - (-t[0] * th.sin() + t[1] * th.cos())).abs() < 1e-14);
}

#[test]
fn planar_bend_rotates_tangent_by_total_curvature() {
    let p = make_profile(ProfileSpec { kappa1: vec![Bump::cos2(0.0, PI, 1.0)], interval: Some((-PI / 2.0, PI / 2.0)), ds: 1e-3, ..Default::default() }).unwrap();
    let f = integrate_frame(&p, 1e-3, (-2.0, 2.0)).unwrap();
    let e1 = f.frame(f.len() - 1)[0];
    let angle = e1[1].atan2(e1[0]);
    assert!((angle - PI / 2.0).abs() < 1e-10, "{angle}");
    // constant frame and affine centre line beyond I
    let (a, b) = (f.index_at(1.7), f.index_at(1.9));
    assert_eq!(f.frame(a), f.frame(b));
    let (ga, gb) = (f.gamma(a), f.gamma(b));
    for k in 0..3 {
        assert!((gb[k] - ga[k] - (f.s(b) - f.s(a)) * e1[k]).abs() < 1e-12);
    }
}

#[test]
fn gram_defect_small_and_rk4_order() {
    let p = general_profile(1e-3);
    let d1 = integrate_frame(&p, 1e-3, (-1.5, 1.5)).unwrap();
    assert!(d1.gram_defect() <= 1e-8);
    let c1 = integrate_frame(&p, 0.05, (-1.5, 1.5)).unwrap();
    let c2 = integrate_frame(&p, 0.025, (-1.5, 1.5)).unwrap();
    let reference = integrate_frame(&p, 1e-4, (-1.5, 1.5)).unwrap();
    assert!(reference.gram_defect() <= 1e-8);
    // end-point error against the fine run halves four times per halving
    let err = |f: &FrameField| {
        let e = f.frame(f.len() - 1);
        let r = reference.frame(reference.len() - 1);
        (0..3).flat_map(|i| (0..3).map(move |k| (i, k))).map(|(i, k)| (e[i][k] - r[i][k]).abs()).fold(0.0, f64::max)
    };
    assert!(err(&d1) < 1e-10);
    let (e1, e2) = (err(&c1), err(&c2));
    eprintln!("rk4 errors {e1:e} {e2:e}");
    assert!(e2 < e1 / 8.0, "{e1} {e2}");
}

#[test]
fn too_coarse_step_is_rejected() {
    let p = make_profile(ProfileSpec { kappa1: vec![Bump::cos2(0.0, 2.0, 60.0)], interval: Some((-1.0, 1.0)), ds: 0.5, ..Default::default() }).unwrap();
    assert!(matches!(integrate_frame(&p, 0.5, (-1.0, 1.0)), Err(twistguide::Error::OrthonormalityDrift { .. })));
}

#[test]
fn metric_matches_finite_difference_jacobian() {
    let ds = 1e-4;
    let p = general_profile(ds);
    let f = integrate_frame(&p, ds, (-1.2, 1.2)).unwrap();
    for (s, t) in [(0.1, [0.2, -0.1]), (-0.6, [-0.3, 0.25]), (0.75, [0.1, 0.3])] {
        let i = f.index_at(s);
        let s = f.s(i);
        let x_p = f.tube_point(&p, i + 1, t);
        let x_m = f.tube_point(&p, i - 1, t);
        let d1: Vec<f64> = (0..3).map(|k| (x_p[k] - x_m[k]) / (2.0 * ds)).collect();
        let (n2, n3) = f.normals(&p, i);
        let cols = [[d1[0], d1[1], d1[2]], n2, n3];
        let m = metric_at(&p, s, t).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let g: f64 = (0..3).map(|k| cols[a][k] * cols[b][k]).sum();
                assert!((g - m.g[(a, b)]).abs() < 1e-7, "G[{a}{b}] {g} vs {}", m.g[(a, b)]);
            }
        }
        // d1 F from the finite difference of h along s
        let hp = metric_at(&p, s + 1e-6, t).unwrap().h;
        let hm = metric_at(&p, s - 1e-6, t).unwrap().h;
        assert!(((hp - hm) / 2e-6 / (2.0 * m.h) - m.grad_f[0]).abs() < 1e-8);
    }
}

#[test]
fn metric_invariants_on_random_samples() {
    let p = general_profile(1e-2);
    let a = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let s = rng.gen_range(-1.5..1.5);
        let r = a * rng.gen::<f64>().sqrt();
        let phi = rng.gen_range(0.0..2.0 * PI);
        let m = metric_at(&p, s, [r * phi.cos(), r * phi.sin()]).unwrap();
        assert!((m.g.determinant() - m.h * m.h).abs() <= 1e-12 * m.h * m.h);
        assert!((m.g_inv * m.g - Matrix3::identity()).abs().max() <= 1e-12);
        let ev = SymmetricEigen::new(m.excess()).eigenvalues;
        assert!(ev.min() >= -1e-12);
    }
}

#[test]
fn ellipticity_and_sampled_h() {
    let p = make_profile(ProfileSpec { kappa1: vec![Bump::cos2(0.0, 1.0, 1.0)], interval: Some((-0.5, 0.5)), ds: 0.01, ..Default::default() }).unwrap();
    let (lo, hi) = ellipticity_bounds(&p, 0.5).unwrap();
    assert_eq!((lo, hi), (0.5, 1.5));
    for i in 0..=40 {
        for j in 0..=40 {
            let t = [-0.35 + 0.7 * i as f64 / 40.0, -0.35 + 0.7 * j as f64 / 40.0];
            if t[0].hypot(t[1]) <= 0.5 {
                let h = metric_at(&p, -0.5 + j as f64 / 40.0, t).unwrap().h;
                assert!(h >= lo - 1e-15 && h <= hi + 1e-15);
            }
        }
    }
    assert!(matches!(ellipticity_bounds(&p, 1.0), Err(twistguide::Error::ImmersionViolation { .. })));
    assert_eq!(ellipticity_bounds(&CurvatureProfile::straight(0.1), 3.0).unwrap(), (1.0, 1.0));
}

#[test]
fn injectivity_examples() {
    let spec = |k1: f64, k2: f64| ProfileSpec {
        kappa1: vec![Bump::cos2(0.0, 1.0, k1)],
        kappa2: if k2 > 0.0 { vec![Bump::cos2(0.0, 1.0, k2)] } else { vec![] },
        interval: Some((-0.5, 0.5)),
        ds: 0.01,
        ..Default::default()
    };
    let r = check_injectivity(&make_profile(spec(1.0, 0.0)).unwrap(), 0.1);
    assert!((r.condition - 4.0).abs() < 1e-12);
    assert_eq!(r.verdict, InjectivityVerdict::Inconclusive);
    let r = check_injectivity(&make_profile(spec(0.2, 0.1)).unwrap(), 0.2);
    assert!((r.condition - 0.24).abs() < 1e-12);
    assert_eq!(r.verdict, InjectivityVerdict::Certified);
    let r = check_injectivity(&CurvatureProfile::straight(0.1), 0.3);
    assert!(r.condition_ok() && r.immersion_ok());
}

#[test]
fn frame_variation_bound_on_sampled_pairs() {
    let p = general_profile(1e-3);
    let f = integrate_frame(&p, 1e-3, (-3.0, 3.0)).unwrap();
    let r = check_injectivity(&p, 0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pairs: Vec<(usize, usize)> = (0..10_000).map(|_| (rng.gen_range(0..f.len()), rng.gen_range(0..f.len()))).collect();
    assert!(frame_bound_excess(&f, &r, 2.0, pairs) <= 1e-12);
    let r = scan_centerline(r, &integrate_frame(&p, 0.05, (-3.0, 3.0)).unwrap(), 0.3);
    assert!(r.scan_ratio.unwrap() > 1.0);
}

#[test]
fn mesh_counts() {
    let p = general_profile(0.05);
    let f = integrate_frame(&p, 0.05, (-1.0, 1.0)).unwrap();
    let m = tube_surface(&f, &p, &twistguide::cross_section::Shape::disk(0.2), 16, 1);
    assert_eq!(m.vertices.len(), 16 * f.len());
    assert_eq!(m.triangles.len(), 2 * 16 * (f.len() - 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_form_matches_matrix(s in -1.2f64..1.2, t2 in -0.4f64..0.4, t3 in -0.4f64..0.4, w in prop::array::uniform3(-2.0f64..2.0)) {
        let p = general_profile(0.01);
        let m = metric_at(&p, s, [t2, t3]).unwrap();
        let v = nalgebra::Vector3::from(w);
        let direct = (v.transpose() * m.g_inv * v)[0];
        prop_assert!((direct - m.inverse_form(w)).abs() <= 1e-12 * (1.0 + direct.abs()));
    }

    #[test]
    fn centerline_metric_is_flat_in_h(s in -1.2f64..1.2) {
        let m = metric_at(&general_profile(0.01), s, [0.0, 0.0]).unwrap();
        prop_assert_eq!(m.h, 1.0);
        prop_assert!((m.g.determinant() - 1.0).abs() < 1e-15);
    }
}
