use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::SymmetricEigen;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistguide::cross_section::*;
use twistguide::curve_geometry::*;
use twistguide::linalg::TripletBuilder;
use twistguide::waveguide_operators::*;

fn basis(shape: Shape, delta: f64) -> Arc<TransverseBasis> {
    Arc::new(TransverseBasis::new(CrossSectionDomain::new(shape, delta).unwrap()).unwrap())
}

fn small_grid(l: f64, end: EndCondition) -> TruncatedTubeGrid {
    TruncatedTubeGrid::new(basis(Shape::rectangle(1.0, 2.0), 0.25), l, 0.25, end).unwrap()
}

fn bump_sigma(amp: f64) -> impl Fn(f64) -> f64 {
    let b = Bump::cos2(0.2, 1.5, amp);
    move |s| b.value(s)
}

fn bent(k1: f64, k2: f64, thetadot: f64) -> CurvatureProfile {
    let cap = |a: f64, c: f64, w: f64| if a == 0.0 { vec![] } else { vec![Bump::cos2(c, w, a)] };
    make_profile(ProfileSpec {
        kappa1: cap(k1, 0.0, 2.0),
        kappa2: cap(k2, 0.1, 1.6),
        theta_dot: cap(thetadot, -0.1, 1.8),
        interval: if k1 == 0.0 { None } else { Some((-1.0, 1.0)) },
        ds: 0.01,
    })
    .unwrap()
}

fn dense_eigs(form: &SymmetricForm) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(form.to_csr().to_dense()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn grid_layout_and_margin() {
    let g = small_grid(4.0, EndCondition::Dirichlet);
    assert_eq!(g.slabs(), 31);
    assert_eq!(g.nt(), 21);
    assert_eq!(g.dofs(), 31 * 21);
    assert!((g.slab_s(0) + 3.75).abs() < 1e-15 && (g.edge_s(0) + 3.875).abs() < 1e-15);
    assert!(g.check_support(Some((-1.9, 1.9))).is_ok());
    assert!(matches!(g.check_support(Some((-2.1, 0.0))), Err(twistguide::Error::InvalidParameter { field: "half_length", .. })));
    let wide = Bump::cos2(0.0, 5.0, 1.0);
    assert!(assemble_l_sigma(&g, &|s| wide.value(s), TwistSign::Minus).is_err());
    assert!(TruncatedTubeGrid::new(g.transverse_arc().clone(), 4.0, 0.3, EndCondition::Dirichlet).is_err());
}

#[test]
fn untwisted_form_is_the_tensor_sum() {
    let g = small_grid(3.5, EndCondition::Dirichlet);
    let lap = assemble_laplacian(&g).unwrap();
    let zero = assemble_l_sigma(&g, &|_| 0.0, TwistSign::Minus).unwrap();
    assert_eq!(lap.to_csr().max_abs_diff(&zero.to_csr()), 0.0);
    // I (x) K + T1 (x) I built independently
    let (n, nt) = (g.slabs(), g.nt());
    let b = 1.0 / (g.ds() * g.ds());
    let k = g.transverse().stiffness();
    let mut t = TripletBuilder::new(n * nt, n * nt);
    for s in 0..n {
        for (i, j, v) in k.iter() {
            t.push(s * nt + i, s * nt + j, v);
        }
        for i in 0..nt {
            t.push(s * nt + i, s * nt + i, 2.0 * b);
            if s + 1 < n {
                t.push(s * nt + i, (s + 1) * nt + i, -b);
                t.push((s + 1) * nt + i, s * nt + i, -b);
            }
        }
    }
    assert!(lap.to_csr().max_abs_diff(&t.build()) < 1e-12 * b);
    // lowest eigenvalue is E1 plus the 1-D Dirichlet value
    let e = dense_eigs(&lap);
    let one_d = 2.0 * b * (1.0 - (PI * g.ds() / (2.0 * g.half_length())).cos());
    assert!((e[0] - lap.e1() - one_d).abs() < 1e-10);
}

#[test]
fn assembled_forms_are_exactly_symmetric() {
    let g = small_grid(3.5, EndCondition::Dirichlet);
    let sig = bump_sigma(1.3);
    let l = assemble_l_sigma(&g, &sig, TwistSign::Minus).unwrap().to_csr();
    assert_eq!(l.asymmetry(), 0.0);
    let q = assemble_q(&g, &bent(0.3, 0.5, -0.8)).unwrap().to_csr();
    assert_eq!(q.asymmetry(), 0.0);
}

#[test]
fn flat_profiles_reduce_to_the_laplacian() {
    let g = small_grid(3.5, EndCondition::Dirichlet);
    let lap = assemble_laplacian(&g).unwrap().to_csr();
    let straight = assemble_q(&g, &CurvatureProfile::straight(0.01)).unwrap().to_csr();
    assert_eq!(straight.max_abs_diff(&lap), 0.0);
    // torsion compensated by rotation: Tang frame of a straight curve
    let b = vec![Bump::cos2(0.1, 1.6, 0.7)];
    let p = make_profile(ProfileSpec { kappa2: b.clone(), theta_dot: b, ds: 0.01, ..Default::default() }).unwrap();
    let tang = assemble_q(&g, &p).unwrap().to_csr();
    assert_eq!(tang.max_abs_diff(&lap), 0.0);
}

#[test]
fn twisted_q_equals_l_sigma() {
    let g = small_grid(3.5, EndCondition::Dirichlet);
    let p = bent(0.0, 0.4, -0.9);
    let q = assemble_q(&g, &p).unwrap();
    let sigma = |s: f64| p.theta_dot(s) - p.kappa2(s);
    let l = assemble_l_sigma(&g, &sigma, TwistSign::Minus).unwrap();
    assert_eq!(q.to_csr().max_abs_diff(&l.to_csr()), 0.0);
    // the opposite convention with the opposite sigma is the same form
    let flipped = assemble_l_sigma(&g, &|s| -sigma(s), TwistSign::Plus).unwrap();
    assert_eq!(flipped.to_csr().max_abs_diff(&l.to_csr()), 0.0);
}

#[test]
fn twisted_spectrum_starts_at_threshold() {
    let g = small_grid(3.5, EndCondition::Dirichlet);
    let l = assemble_l_sigma(&g, &bump_sigma(2.0), TwistSign::Minus).unwrap();
    let e = dense_eigs(&l);
    assert!(e[0] >= l.e1() - 1e-10, "{} < {}", e[0], l.e1());
    assert_eq!(count_below(&l, l.e1() - 1e-10).unwrap(), 0);
    let x = random_vec(l.dofs(), 3);
    let xx: f64 = x.iter().map(|v| v * v).sum();
    assert!(l.quadratic(&x) >= l.e1() * xx);
}

#[test]
fn sign_flip_leaves_spectrum_invariant() {
    let g = small_grid(3.5, EndCondition::Dirichlet);
    let sig = bump_sigma(1.5);
    let a = dense_eigs(&assemble_l_sigma(&g, &sig, TwistSign::Minus).unwrap());
    let b = dense_eigs(&assemble_l_sigma(&g, &sig, TwistSign::Plus).unwrap());
    for (x, y) in a.iter().zip(&b).take(20) {
        assert!((x - y).abs() < 1e-9 * x.abs());
    }
}

#[test]
fn modal_operator_matches_nodal_blocks() {
    let g = small_grid(3.5, EndCondition::Dirichlet);
    let f = assemble_q(&g, &bent(0.3, 0.5, -0.8)).unwrap();
    let op = ModalOperator::new(&f).unwrap();
    assert_eq!(op.len(), f.dofs());
    let x = random_vec(f.dofs(), 9);
    let nodal = f.apply(&x);
    let modal = op.to_nodal(&op.apply_shifted(&op.from_nodal(&x), 0.0));
    let scale = nodal.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in nodal.iter().zip(&modal) {
        assert!((a - b).abs() < 1e-11 * scale);
    }
    // factorization solves and counts like the dense matrix
    let tau = f.e1() + 3.0;
    let fac = op.factor(tau).unwrap();
    let e = dense_eigs(&f);
    assert_eq!(fac.negatives(), e.iter().filter(|&&v| v < tau).count());
    let r = op.from_nodal(&x);
    let y = fac.solve(&r);
    let back = op.apply_shifted(&y, tau);
    for (a, b) in back.iter().zip(&r) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn bisection_matches_dense_eigenvalues() {
    // coarse section, long tube: the planar bend binds visibly
    let tb = basis(Shape::rectangle(1.0, 2.0), 0.5);
    let g = TruncatedTubeGrid::new(tb, 20.0, 0.25, EndCondition::Dirichlet).unwrap();
    let p = make_profile(ProfileSpec { kappa1: vec![Bump::cos2(0.0, 3.0, 0.85)], interval: Some((-1.5, 1.5)), ds: 0.01, ..Default::default() }).unwrap();
    let f = assemble_q(&g, &p).unwrap();
    let e = dense_eigs(&f);
    for tau in [e[0] - 0.1, 0.5 * (e[0] + e[1]), f.e1(), e[40] + 1e-3] {
        assert_eq!(count_below(&f, tau).unwrap(), e.iter().filter(|&&v| v < tau).count());
    }
    let below: Vec<f64> = e.iter().copied().filter(|&v| v < f.e1() - 1e-10 * f.e1()).collect();
    let res = eigenvalues_below_threshold(&f, &SpectralOptions::default()).unwrap();
    assert_eq!(res.count_below, below.len());
    assert!(!below.is_empty());
    for ((a, b), r) in res.values.iter().zip(&below).zip(&res.residuals) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        assert!(*r <= 1e-8);
    }
    let v = &res.vectors[0];
    let av = f.apply(v);
    let rq: f64 = av.iter().zip(v).map(|(a, b)| a * b).sum();
    assert!((rq - res.values[0]).abs() < 1e-9);
}

#[test]
fn straight_tube_has_nothing_below_threshold() {
    let tb = basis(Shape::rectangle(1.0, 2.0), 0.1);
    let ds = 0.1;
    let g = TruncatedTubeGrid::new(tb, 10.0, ds, EndCondition::Dirichlet).unwrap();
    let res = eigenvalues_below_threshold(&assemble_laplacian(&g).unwrap(), &SpectralOptions::default()).unwrap();
    assert_eq!(res.count_below, 0);
    assert!(res.values.is_empty());
    let e1 = g.transverse().e1();
    let exact = e1 + 2.0 / (ds * ds) * (1.0 - (PI * ds / 20.0).cos());
    let low = res.diagnostic.unwrap();
    assert!((low - exact).abs() < 1e-10);
    assert!((low - e1 - PI * PI / 400.0).abs() < 1e-3 * PI * PI / 400.0);
}

#[test]
fn straight_truncation_study_approaches_threshold() {
    let tb = basis(Shape::rectangle(1.0, 2.0), 0.25);
    let g = TruncatedTubeGrid::new(tb, 5.0, 0.05, EndCondition::Dirichlet).unwrap();
    let st = truncation_study(&g, &[5.0, 10.0, 20.0], &|g| assemble_laplacian(g), &SpectralOptions::default()).unwrap();
    let e1 = st.threshold;
    let mut prev = f64::INFINITY;
    for row in &st.rows {
        assert_eq!(row.count_below, 0);
        assert!(row.lowest < prev && row.lowest > e1);
        let gap = (PI / (2.0 * row.half_length)).powi(2);
        assert!(((row.lowest - e1) / gap - 1.0).abs() < 1e-3);
        prev = row.lowest;
    }
    assert!(!st.converged(1e-6));
}

#[test]
fn tang_bend_binds_independently_of_length() {
    let tb = basis(Shape::rectangle(1.0, 2.0), 0.25);
    let p = bent(0.3, 0.6, 0.0);
    let tang = make_profile(ProfileSpec {
        theta_dot: p.spec().kappa2.clone(),
        ..p.spec().clone()
    })
    .unwrap();
    let g = TruncatedTubeGrid::new(tb, 6.0, 0.1, EndCondition::Transparent).unwrap();
    let st = truncation_study(&g, &[6.0, 12.0], &|g| assemble_q(g, &tang), &SpectralOptions::default()).unwrap();
    assert!(st.rows.iter().all(|r| r.count_below >= 1 && r.residual.unwrap() <= 1e-8));
    assert!(st.converged(1e-10), "{:?}", st.rows);
    // Dirichlet truncation sits above the transparent value
    let gd = g.with_end(EndCondition::Dirichlet);
    let d = eigenvalues_below_threshold(&assemble_q(&gd, &tang).unwrap(), &SpectralOptions::default()).unwrap();
    assert!(d.lowest().unwrap() > st.rows[0].lowest);
}

#[test]
fn twisted_straight_tube_binds_nothing() {
    let tb = basis(Shape::rectangle(1.0, 2.0), 0.25);
    for l in [5.0, 10.0] {
        for end in [EndCondition::Dirichlet, EndCondition::Transparent] {
            let g = TruncatedTubeGrid::new(tb.clone(), l, 0.1, end).unwrap();
            let res = eigenvalues_below_threshold(&assemble_l_sigma(&g, &bump_sigma(1.0), TwistSign::Minus).unwrap(), &SpectralOptions::default()).unwrap();
            assert_eq!(res.count_below, 0);
        }
    }
}

#[test]
fn radial_function_does_not_feel_the_twist() {
    // d_tau of a radial function vanishes; only O(delta^2) stencil error remains
    let mut prev = f64::INFINITY;
    for d in [0.2, 0.1] {
        let tb = basis(Shape::disk(1.0), d);
        let g = TruncatedTubeGrid::new(tb.clone(), 4.0, 0.1, EndCondition::Dirichlet).unwrap();
        let j = 2.404825557695773;
        let x: Vec<f64> = (0..g.slabs())
            .flat_map(|k| {
                let s = g.slab_s(k as isize);
                let gs = (PI * s / 8.0).cos();
                tb.domain().points().iter().map(move |p| gs * bessel_j0(j * (p[0] * p[0] + p[1] * p[1]).sqrt())).collect::<Vec<_>>()
            })
            .collect();
        let plain = assemble_l_sigma(&g, &|_| 0.0, TwistSign::Minus).unwrap().quadratic(&x);
        let twisted = assemble_l_sigma(&g, &bump_sigma(3.0), TwistSign::Minus).unwrap().quadratic(&x);
        let diff = ((twisted - plain) / plain).abs();
        assert!(diff < 2e-3 && diff < prev / 3.0, "delta {d}: {diff}");
        prev = diff;
    }
}

fn bessel_j0(x: f64) -> f64 {
    let q = -x * x / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..60 {
        term *= q / (k as f64 * k as f64);
        sum += term;
    }
    sum
}

#[test]
fn weighted_problem_far_field_is_length_independent() {
    let tb = basis(Shape::rectangle(1.0, 2.0), 0.25);
    let w = |s: f64| 1.0 / (1.0 + s * s);
    let sig = bump_sigma(1.0);
    let mut mus = Vec::new();
    for l in [5.0, 10.0] {
        let g = TruncatedTubeGrid::new(tb.clone(), l, 0.1, EndCondition::Transparent).unwrap();
        let f = assemble_l_sigma(&g, &sig, TwistSign::Minus).unwrap();
        let opts = WeightedOptions { far_field: Some(FarField { s0: 0.0, extra_slabs: 100_000 }), ..Default::default() };
        let r = lowest_weighted(&f, &w, &opts).unwrap();
        assert!(r.residual <= 1e-8 && r.mu > 0.0 && r.mu < 0.25);
        mus.push(r.mu);
    }
    assert!((mus[0] - mus[1]).abs() < 1e-8 * mus[0], "{mus:?}");
    // Dirichlet truncation only approaches it from above
    let g = TruncatedTubeGrid::new(tb, 10.0, 0.1, EndCondition::Dirichlet).unwrap();
    let d = lowest_weighted(&assemble_l_sigma(&g, &sig, TwistSign::Minus).unwrap(), &w, &WeightedOptions::default()).unwrap();
    assert!(d.mu > mus[0] && d.residual <= 1e-8);
}

#[test]
fn weighted_dirichlet_matches_dense_pencil() {
    let g = small_grid(3.5, EndCondition::Dirichlet);
    let f = assemble_l_sigma(&g, &bump_sigma(1.0), TwistSign::Minus).unwrap();
    let w = |s: f64| 1.0 / (1.0 + s * s);
    let r = lowest_weighted(&f, &w, &WeightedOptions::default()).unwrap();
    let a = f.to_csr().to_dense();
    let n = a.nrows();
    let sw: Vec<f64> = (0..n).map(|i| w(g.slab_s((i / g.nt()) as isize)).sqrt()).collect();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| (a[(i, j)] - if i == j { f.e1() } else { 0.0 }) / (sw[i] * sw[j]));
    let low = SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    assert!((r.mu - low).abs() < 1e-9 * low, "{} vs {low}", r.mu);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_bends_stay_symmetric(k1 in 0.05f64..0.6, k2 in -1.0f64..1.0, td in -1.0f64..1.0) {
        let g = small_grid(3.5, EndCondition::Dirichlet);
        let f = assemble_q(&g, &bent(k1, k2, td)).unwrap();
        prop_assert_eq!(f.to_csr().asymmetry(), 0.0);
    }

    #[test]
    fn twisted_form_bounded_by_threshold(amp in -3.0f64..3.0, seed in 0u64..1000) {
        let g = small_grid(3.5, EndCondition::Dirichlet);
        let f = assemble_l_sigma(&g, &bump_sigma(amp), TwistSign::Minus).unwrap();
        let x = random_vec(f.dofs(), seed);
        let xx: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!(f.quadratic(&x) >= (f.e1() - 1e-10) * xx);
    }
}
