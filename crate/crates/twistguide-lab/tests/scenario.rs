use std::path::Path;

use proptest::prelude::*;
use twistguide_lab::scenario::*;
use twistguide_lab::{LabError, Scenario};

fn base() -> Scenario {
    Scenario::from_json(
        r#"{
  "name": "base",
  "cross_section": { "shape": "rectangle", "width": 1.0, "height": 2.0 },
  "profile": { "theta_dot": [{ "center": 0.0, "width": 2.0, "amplitude": 1.0 }] },
  "half_length": 5.0,
  "resolution": { "delta": 0.1, "ds": 0.1 },
  "task": { "kind": "hardy" }
}"#,
    )
    .unwrap()
}

fn invalid_field(text: &str) -> String {
    match Scenario::from_json(text) {
        Err(LabError::Invalid { field, .. }) => field,
        other => panic!("expected a field error, got {other:?}"),
    }
}

fn with(edit: impl FnOnce(&mut serde_json::Value)) -> String {
    let mut v: serde_json::Value = serde_json::from_str(&base().to_json()).unwrap();
    edit(&mut v);
    v.to_string()
}

#[test]
fn shipped_scenarios_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let sc = twistguide_lab::load_scenario(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = Scenario::from_json(&sc.to_json()).unwrap();
        assert_eq!(sc, again);
        assert_eq!(sc.to_json(), again.to_json());
        assert_eq!(sc.hash(), again.hash());
        seen += 1;
    }
    assert!(seen >= 7);
}

#[test]
fn defaults_are_filled_in() {
    let sc = base();
    assert_eq!(sc.ends, Ends::Dirichlet);
    assert_eq!(sc.profile.sampling, 0.01);
    assert_eq!(sc.profile.theta_dot[0].kind, BumpShape::Cos2);
    assert_eq!(sc.task, Task::Hardy { s0: 0.0, lengths: vec![], far_field: None, power: Power::Squared });
    assert_eq!(sc.lengths(), vec![5.0]);
    assert_eq!(sc.deltas(), vec![0.1]);
    assert_eq!(sc.task.name(), "hardy");
}

#[test]
fn parse_errors_carry_line_and_column() {
    let text = "{\n  \"name\": \"x\",\n  \"half_length\": ,\n}";
    match Scenario::from_json(text) {
        Err(LabError::Parse { line, column, .. }) => assert_eq!((line, column), (3, 18)),
        other => panic!("{other:?}"),
    }
    let unknown = with(|v| v["resolutoin"] = serde_json::json!(1));
    assert!(matches!(Scenario::from_json(&unknown), Err(LabError::Parse { .. })));
    let bad_task = with(|v| v["task"]["kind"] = "eigenmodes".into());
    let e = Scenario::from_json(&bad_task).unwrap_err();
    assert!(e.to_string().contains("eigenmodes"), "{e}");
}

#[test]
fn violations_name_their_field() {
    assert_eq!(invalid_field(&with(|v| v["resolution"]["delta"] = (-0.1).into())), "resolution.delta");
    assert_eq!(invalid_field(&with(|v| v["resolution"]["ds"] = 0.0.into())), "resolution.ds");
    assert_eq!(invalid_field(&with(|v| v["cross_section"]["height"] = 0.0.into())), "cross_section.height");
    assert_eq!(invalid_field(&with(|v| v["profile"]["theta_dot"][0]["width"] = (-1.0).into())), "profile.theta_dot[0].width");
    assert_eq!(invalid_field(&with(|v| v["half_length"] = 5.03.into())), "half_length");
    assert_eq!(invalid_field(&with(|v| v["task"]["far_field"] = 10.into())), "task.far_field");
    assert_eq!(invalid_field(&with(|v| v["task"]["lengths"] = serde_json::json!([5.0, -1.0]))), "task.lengths[1]");
    assert_eq!(invalid_field(&with(|v| v["name"] = "a/b".into())), "name");
    let bent = with(|v| {
        v["profile"]["kappa1"] = serde_json::json!([{ "center": 0.0, "width": 1.0, "amplitude": 0.1 }]);
        v["profile"]["interval"] = serde_json::json!([-0.5, 0.5]);
    });
    assert_eq!(invalid_field(&bent), "profile.kappa1");
    let sweep = with(|v| v["task"] = serde_json::json!({ "kind": "sweep", "mode": "bend", "ks": [] }));
    assert_eq!(invalid_field(&sweep), "task.ks");
    // kappa1 without an interval is caught by the profile builder
    let no_interval = with(|v| {
        v["profile"]["kappa1"] = serde_json::json!([{ "center": 0.0, "width": 1.0, "amplitude": 0.1 }]);
        v["task"] = serde_json::json!({ "kind": "sweep", "mode": "bend", "ks": [0.1] });
    });
    assert_eq!(invalid_field(&no_interval), "profile");
}

#[test]
fn hash_ignores_formatting_only() {
    let sc = base();
    let compact = serde_json::to_string(&sc).unwrap();
    assert_eq!(Scenario::from_json(&compact).unwrap().hash(), sc.hash());
    let mut other = sc.clone();
    other.resolution.delta = 0.1 + 1e-16 * 2.0;
    assert_ne!(other.hash(), sc.hash());
}

fn float() -> impl Strategy<Value = f64> {
    prop_oneof![0.01f64..10.0, (1u32..1000).prop_map(|n| n as f64 * 0.05), any::<f64>().prop_filter("positive finite", |x| *x > 0.0 && x.is_finite())]
}

fn bump() -> impl Strategy<Value = BumpConfig> {
    (any::<bool>(), -1e3f64..1e3, float(), -1e3f64..1e3).prop_map(|(poly, center, width, amplitude)| BumpConfig {
        kind: if poly { BumpShape::Poly } else { BumpShape::Cos2 },
        center,
        width,
        amplitude,
    })
}

fn shape() -> impl Strategy<Value = ShapeConfig> {
    prop_oneof![
        (float(), float(), any::<[f64; 2]>().prop_filter("finite", |c| c.iter().all(|x| x.is_finite())))
            .prop_map(|(width, height, center)| ShapeConfig::Rectangle { width, height, center }),
        float().prop_map(|radius| ShapeConfig::Disk { radius, center: [0.0, 0.0] }),
        (float(), float()).prop_map(|(a, b)| ShapeConfig::Ellipse { semi_axes: [a, b], center: [0.1, -0.2] }),
        prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0).prop_map(|(x, y)| [x, y]), 3..8).prop_map(|vertices| ShapeConfig::Polygon { vertices }),
    ]
}

fn task() -> impl Strategy<Value = Task> {
    let list = || prop::collection::vec(float(), 0..4);
    prop_oneof![
        list().prop_map(|deltas| Task::GroundPair { deltas }),
        list().prop_map(|deltas| Task::Lambda { deltas }),
        (list(), 1usize..9, list()).prop_map(|(lengths, max_count, slices)| Task::Spectrum { lengths, max_count, slices }),
        (float(), list(), proptest::option::of(0usize..1_000_000), any::<bool>()).prop_map(|(s0, lengths, far_field, lin)| Task::Hardy {
            s0,
            lengths,
            far_field,
            power: if lin { Power::Linear } else { Power::Squared }
        }),
        (any::<bool>(), list(), list(), any::<bool>()).prop_map(|(b, ks, lengths, include_epsilon)| Task::Sweep {
            mode: if b { SweepKind::Bend } else { SweepKind::BendAndTorsion },
            ks,
            lengths,
            include_epsilon
        }),
        any::<bool>().prop_map(|scan| Task::Injectivity { scan }),
        proptest::option::of(float()).prop_map(|s0| Task::Constants { s0, power: Power::Squared }),
    ]
}

prop_compose! {
    fn scenario()(
        name in "[a-z0-9-]{1,12}",
        cross_section in shape(),
        k1 in prop::collection::vec(bump(), 0..3),
        k2 in prop::collection::vec(bump(), 0..3),
        td in prop::collection::vec(bump(), 0..3),
        interval in proptest::option::of((-10.0f64..0.0, 0.0f64..10.0).prop_map(|(a, b)| [a, b])),
        sampling in float(),
        half_length in float(),
        delta in float(),
        ds in float(),
        transparent in any::<bool>(),
        task in task(),
        output in proptest::option::of("[a-z/]{1,10}"),
    ) -> Scenario {
        Scenario {
            name,
            cross_section,
            profile: ProfileConfig { kappa1: k1, kappa2: k2, theta_dot: td, interval, sampling },
            half_length,
            resolution: Resolution { delta, ds },
            ends: if transparent { Ends::Transparent } else { Ends::Dirichlet },
            task,
            output,
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Serialization is lossless for every representable scenario, valid or not.
    #[test]
    fn configs_round_trip_losslessly(sc in scenario()) {
        let text = sc.to_json();
        let back: Scenario = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &sc);
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(back.hash(), sc.hash());
    }
}
