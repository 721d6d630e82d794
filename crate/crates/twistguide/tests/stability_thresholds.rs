use std::sync::Arc;

use proptest::prelude::*;
use twistguide::cross_section::{CrossSectionDomain, Shape};
use twistguide::curve_geometry::*;
use twistguide::stability_thresholds::*;
use twistguide::waveguide_operators::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-14 * (1.0 + b.abs())
}

#[test]
fn zero_radius_ledger() {
    for mode in [ThresholdMode::Twisted { shear: 3.0 }, ThresholdMode::MildTorsion { kappa2: Some(2.0) }] {
        let l = constants_ledger(mode, 0.0, 5.0);
        let [c1, c2, c3, c4, c5, c6, c7] = l.c;
        assert_eq!((c1, c2, c4, c6), (0.0, 1.0, 0.0, 1.0));
        match mode {
            ThresholdMode::Twisted { .. } => assert_eq!(c3, 1.0),
            ThresholdMode::MildTorsion { .. } => assert_eq!(c3, 2.0),
        }
        assert!(close(c5, (3.0 * c3).sqrt()));
        assert!(close(c7, 6.0 * c3));
    }
}

#[test]
fn worked_ledger_rows() {
    let l = constants_ledger(ThresholdMode::Twisted { shear: 1.0 }, 0.5, 1.0);
    let [c1, c2, c3, c4, _, c6, _] = l.c;
    assert!(close(c1, 6.75) && close(c2, 2.0) && close(c3, 1.75));
    assert!(close(c4, 35.4375) && close(c6, 36.4375));

    let m = constants_ledger(ThresholdMode::MildTorsion { kappa2: Some(0.0) }, 0.5, 1.0);
    assert!(close(m.c[0], 6.75) && m.c[2] == 2.0);
    // capped torsion counts a ||kappa2|| as one
    let capped = constants_ledger(ThresholdMode::MildTorsion { kappa2: None }, 0.5, 1.0);
    assert!(close(capped.c[0], 6.0 * 0.5 * 2.5f64.powi(2)));
    assert_eq!(ThresholdMode::Twisted { shear: 0.0 }.k_definition(), "k = ||kappa1|| + ||kappa1'||");
}

#[test]
fn epsilon_worked_example() {
    let l = constants_ledger(ThresholdMode::Twisted { shear: 1.0 }, 0.0, 0.0);
    let (c_h, e1, interval) = (1.0 / 66.0, 12.337, (-0.5, 0.5));
    let eps = epsilon_threshold(&l, c_h, e1, interval, 0.0, KShares { kappa1: 0.3, kappa2: 0.0 }, 0.01).unwrap();
    let expect = c_h / (c_h + (e1 + 6.0) * 1.25);
    assert!(close(eps.epsilon, expect), "{} {expect}", eps.epsilon);
    assert!((eps.epsilon - 6.6060e-4).abs() < 1e-7);
    assert_eq!(eps.binding, Branch::Positivity);
    assert!(close(eps.weight_max, 1.25));
    // the final integrand is nonnegative at k = eps and not beyond
    let worst = |k: f64| (0..=4000).map(|i| -3.0 + 6.0 * i as f64 / 4000.0).map(|s| lower_bound_integrand(&l, c_h, e1, interval, 0.0, k, s)).fold(f64::INFINITY, f64::min);
    assert!(worst(eps.epsilon) >= -1e-17);
    assert!(worst(1.01 * eps.epsilon) < 0.0);
}

#[test]
fn epsilon_monotonicity() {
    let eps = |shear: f64, a: f64, e1: f64, c_h: f64| {
        let l = constants_ledger(ThresholdMode::Twisted { shear }, a, 0.5);
        epsilon_threshold(&l, c_h, e1, (-1.0, 1.0), 0.0, KShares { kappa1: 0.39, kappa2: 0.0 }, 0.01).unwrap().epsilon
    };
    let base = eps(1.0, 0.5, 10.0, 1e-3);
    assert!(base > 0.0);
    assert!(eps(2.0, 0.5, 10.0, 1e-3) <= base);
    assert!(eps(1.0, 0.7, 10.0, 1e-3) <= base);
    assert!(eps(1.0, 0.5, 20.0, 1e-3) <= base);
    let mut prev = f64::INFINITY;
    for c_h in [1e-2, 1e-4, 1e-6, 1e-8] {
        let e = eps(1.0, 0.5, 10.0, c_h);
        assert!(e < prev && e > 0.0);
        prev = e;
    }
    assert!(prev < 1e-9);
    let l = constants_ledger(ThresholdMode::Twisted { shear: 1.0 }, 0.5, 0.5);
    assert!(matches!(
        epsilon_threshold(&l, 0.0, 10.0, (-1.0, 1.0), 0.0, KShares::default(), 0.01),
        Err(twistguide::Error::NonPositiveHardyBound { .. })
    ));
}

#[test]
fn immersion_and_cap_branches() {
    let l = constants_ledger(ThresholdMode::MildTorsion { kappa2: None }, 0.5, 0.0);
    let e = epsilon_threshold(&l, 1e3, 1.0, (0.0, 0.0), 0.0, KShares { kappa1: 0.5, kappa2: 0.5 }, 0.1).unwrap();
    let branch = |b: Branch| e.branches.iter().find(|x| x.0 == b).unwrap().1;
    assert!(close(branch(Branch::Immersion), 2.0));
    assert!(close(branch(Branch::Kappa2Cap), (1.0 - ETA) / 0.25));
    assert!(close(branch(Branch::Comparison), (1.0 - ETA) / l.c[5]));
    assert_eq!(e.epsilon, e.branches.iter().map(|b| b.1).fold(f64::INFINITY, f64::min));
}

fn coarse_grid() -> TruncatedTubeGrid {
    let basis = Arc::new(TransverseBasis::new(CrossSectionDomain::new(Shape::rectangle(1.0, 2.0), 0.25).unwrap()).unwrap());
    TruncatedTubeGrid::new(basis, 10.0, 0.1, EndCondition::Transparent).unwrap()
}

fn bend(kappa2: f64, theta_dot: f64) -> CurvatureProfile {
    make_profile(ProfileSpec {
        kappa1: vec![Bump::cos2(0.0, 2.0, 0.1)],
        kappa2: vec![Bump::cos2(0.0, 2.0, kappa2)],
        theta_dot: if theta_dot != 0.0 { vec![Bump::cos2(0.0, 2.0, theta_dot)] } else { vec![] },
        interval: Some((-1.0, 1.0)),
        ds: 0.01,
    })
    .unwrap()
}

#[test]
fn strength_rescaling() {
    let p = bend(0.3, 0.0);
    let q = profile_at_strength(&p, SweepMode::Bend, 0.5).unwrap();
    assert!((bend_strength(&q, SweepMode::Bend) - 0.5).abs() < 1e-12);
    assert_eq!(q.norms().kappa2, p.norms().kappa2);
    let r = profile_at_strength(&p, SweepMode::BendAndTorsion, 0.5).unwrap();
    assert!((bend_strength(&r, SweepMode::BendAndTorsion) - 0.5).abs() < 1e-12);
    assert!(profile_at_strength(&CurvatureProfile::straight(0.1), SweepMode::Bend, 1.0).is_err());
}

#[test]
fn tang_frame_binds_and_twist_delays_onset() {
    let grid = coarse_grid();
    let opts = SpectralOptions::default();
    let ks = [0.0, 0.25, 1.5];
    let tang = bend_sweep(&bend(1.0, 1.0), SweepMode::Bend, &ks[1..], &grid, &[10.0], None, &opts).unwrap();
    assert!(tang.rows.iter().all(|r| r.count_below > 0), "{:?}", tang.rows);
    let twisted = bend_sweep(&bend(0.3, 0.0), SweepMode::Bend, &ks, &grid, &[10.0, 12.0], Some(1e-3), &opts).unwrap();
    assert_eq!(twisted.rows.len(), 6);
    assert!(twisted.rows[0].count_below == 0 && twisted.rows[0].within_epsilon);
    assert!(twisted.rows[2].count_below == 0, "{:?}", twisted.rows);
    assert!(twisted.stable_below_epsilon() && twisted.monotone());
    assert_eq!(twisted.conservative(), Some(true));
    assert!((twisted.derivative_ratio - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    // the same rows at two lengths agree with transparent ends
    for pair in twisted.rows.chunks(2) {
        assert_eq!(pair[0].count_below, pair[1].count_below);
    }
}

#[test]
fn immersion_violation_skips_the_row() {
    let grid = coarse_grid();
    let t = bend_sweep(&bend(0.3, 0.0), SweepMode::Bend, &[3.0], &grid, &[10.0], None, &SpectralOptions::default()).unwrap();
    assert!(t.rows[0].skipped.is_some());
    assert_eq!(t.rows[0].injectivity, InjectivityVerdict::ImmersionViolated);
}

#[test]
fn sweep_table_flags_non_monotone_onset() {
    let row = |k: f64, c: usize| SweepRow {
        k,
        half_length: 10.0,
        lowest: None,
        count_below: c,
        threshold: 1.0,
        within_epsilon: false,
        injectivity: InjectivityVerdict::Certified,
        skipped: None,
    };
    let t = SweepTable { mode: SweepMode::Bend, rows: vec![row(0.1, 0), row(0.2, 1), row(0.3, 0)], derivative_ratio: 1.0, k_per_unit: 1.0, epsilon: Some(0.15) };
    assert!(!t.monotone());
    assert_eq!(t.onset(), Some(0.2));
    assert_eq!(t.conservative(), Some(true));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn derived_constants_follow_their_definitions(a in 0.0f64..2.0, r in 0.0f64..5.0, td in 0.0f64..5.0, twisted in any::<bool>()) {
        let mode = if twisted { ThresholdMode::Twisted { shear: r } } else { ThresholdMode::MildTorsion { kappa2: Some(r) } };
        let [c1, c2, c3, c4, c5, c6, c7] = constants_ledger(mode, a, td).c;
        prop_assert_eq!(c4, 3.0 * c1 * c3);
        prop_assert_eq!(c6, 1.0 + c4);
        prop_assert_eq!(c7, 2.0 * c5 * c5);
        prop_assert!((c5 - c2 * (3.0 * c3 * (1.0 + c4)).sqrt()).abs() <= 1e-14 * c5);
        prop_assert!(c1 >= 0.0 && c2 >= 1.0 && c3 >= 1.0);
    }
}

#[test]
fn sweep_epsilon_for_twisted_and_tang_families() {
    let shape = Shape::rectangle(1.0, 2.0);
    let a = shape.radius_about_origin();
    let e = sweep_epsilon(&bend(0.3, 0.0), SweepMode::Bend, 0.75, a, 12.25).unwrap();
    assert!(e.threshold.epsilon > 0.0 && e.threshold.epsilon < 1e-3, "{:?}", e.threshold);
    assert_eq!(e.threshold.binding, Branch::Positivity);
    assert_eq!(e.ledger.mode, ThresholdMode::Twisted { shear: 0.3 });
    assert!((e.shares.kappa1 - 1.0 / (1.0 + std::f64::consts::FRAC_PI_2)).abs() < 1e-9);
    // the Tang frame has no effective twist and hence no threshold
    assert!(sweep_epsilon(&bend(1.0, 1.0), SweepMode::Bend, 0.75, a, 12.25).is_err());
    let m = sweep_epsilon(&bend(0.3, 1.0), SweepMode::BendAndTorsion, 0.75, a, 12.25).unwrap();
    assert!(m.threshold.epsilon > 0.0 && m.shares.kappa2 > 0.0);
}
