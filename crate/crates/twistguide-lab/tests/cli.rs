use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use twistguide_lab::{Manifest, MANIFEST_FILE};

const SQUARE: &str = r#"{
  "name": "square",
  "cross_section": { "shape": "rectangle", "width": 1.0, "height": 1.0 },
  "half_length": 1.0,
  "resolution": { "delta": 0.05, "ds": 0.1 },
  "task": { "kind": "ground_pair", "deltas": [0.1, 0.05] }
}"#;

const BENT: &str = r#"{
  "name": "bent",
  "cross_section": { "shape": "rectangle", "width": 1.0, "height": 2.0 },
  "profile": {
    "kappa1": [{ "center": 0.0, "width": 2.0, "amplitude": 0.2 }],
    "kappa2": [{ "center": 0.0, "width": 2.0, "amplitude": 0.5 }],
    "interval": [-1.0, 1.0]
  },
  "half_length": 4.0,
  "resolution": { "delta": 0.25, "ds": 0.25 },
  "task": { "kind": "injectivity", "scan": false }
}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_twistguide-lab"));
    c.env_remove(twistguide_lab::OUTPUT_ENV);
    c
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn ok(out: Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn run(config: &Path, out: &Path) -> String {
    ok(bin().arg("run").arg(config).arg("--out").arg(out).output().unwrap())
}

fn listing(dir: &Path) -> BTreeSet<String> {
    fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect()
}

#[test]
fn ground_pair_run_writes_a_complete_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "square.json", SQUARE);
    let out = tmp.path().join("out");
    let stdout = run(&cfg, &out);
    assert!(stdout.contains("exact E1 = 19.739208802178716"), "{stdout}");

    let csv = fs::read_to_string(out.join("ground.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("scenario,delta,e1,e2,residual,exact_e1"));
    let fine: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
    let e1: f64 = fine[2].parse().unwrap();
    let exact = 2.0 * std::f64::consts::PI.powi(2);
    // second-order scheme: the error is O(delta^2)
    assert!(((e1 - exact) / exact).abs() < 2.0 * 0.05f64.powi(2), "{e1}");
    // shortest round-trip formatting
    assert_eq!(format!("{e1:?}"), fine[2]);

    let m = Manifest::load(&out.join(MANIFEST_FILE)).unwrap();
    assert_eq!(m.scenario, "square");
    assert_eq!(m.task, "ground_pair");
    let listed: BTreeSet<String> = m.artifacts.iter().map(|a| a.path.clone()).collect();
    let mut on_disk = listing(&out);
    on_disk.remove(MANIFEST_FILE);
    assert_eq!(listed, on_disk);
    m.verify(&out).unwrap();
    let sc = twistguide_lab::load_scenario(&cfg).unwrap();
    assert_eq!(m.scenario_hash, sc.hash());

    let pts = fs::read_to_string(out.join("ground_state.csv")).unwrap();
    assert!(pts.starts_with("t2,t3,value\n"));
    assert_eq!(pts.lines().count(), 1 + 19 * 19);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "square.json", SQUARE);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run(&cfg, &a);
    ok(bin().arg("run").arg(&cfg).arg("--out").arg(&b).args(["--threads", "2"]).output().unwrap());
    for name in listing(&a) {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn report_reprints_the_recorded_results() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bent.json", BENT);
    let out = tmp.path().join("out");
    run(&cfg, &out);
    let report = ok(bin().arg("report").arg(out.join(MANIFEST_FILE)).output().unwrap());
    assert_eq!(report, fs::read_to_string(out.join("report.txt")).unwrap());
    assert!(report.contains("injectivity condition: INCONCLUSIVE"), "{report}");
    assert!(report.contains("max{4|I|^2 ||kappa1||^2, 4a(||kappa1|| + ||kappa2||)} = "), "{report}");

    // a modified artifact is refused
    fs::write(out.join("injectivity.csv"), "tampered\n").unwrap();
    let bad = bin().arg("report").arg(out.join(MANIFEST_FILE)).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("injectivity.csv"));
}

#[test]
fn invalid_configs_exit_nonzero_with_the_field_name() {
    let tmp = tempfile::tempdir().unwrap();
    let neg = write(tmp.path(), "neg.json", &SQUARE.replace("\"delta\": 0.05", "\"delta\": -0.05"));
    let out = bin().arg("run").arg(&neg).arg("--out").arg(tmp.path().join("x")).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("resolution.delta"), "{err}");
    assert!(!tmp.path().join("x").exists());

    let broken = write(tmp.path(), "broken.json", &SQUARE.replace("\"half_length\": 1.0,", "\"half_length\": 1.0"));
    let out = bin().arg("run").arg(&broken).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5, column 3"), "{err}");

    let missing = bin().arg("run").arg(tmp.path().join("nope.json")).output().unwrap();
    assert!(!missing.status.success());
}

#[test]
fn output_directory_resolution() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bent.json", BENT);
    let root = tmp.path().join("env-root");
    ok(bin().arg("run").arg(&cfg).env(twistguide_lab::OUTPUT_ENV, &root).output().unwrap());
    assert!(root.join("bent").join(MANIFEST_FILE).exists());

    // the scenario's own directory resolves against the config file
    let own = write(tmp.path(), "own.json", &BENT.replace("\"name\": \"bent\",", "\"name\": \"bent\", \"output\": \"results/here\","));
    ok(bin().current_dir("/").arg("run").arg(&own).env(twistguide_lab::OUTPUT_ENV, &root).output().unwrap());
    assert!(tmp.path().join("results/here").join(MANIFEST_FILE).exists());
}

#[test]
fn busy_output_directory_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bent.json", BENT);
    let out = tmp.path().join("out");
    fs::create_dir_all(&out).unwrap();
    fs::write(out.join(".lock"), "").unwrap();
    let r = bin().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("in use"));
    fs::remove_file(out.join(".lock")).unwrap();
    run(&cfg, &out);
    assert!(!out.join(".lock").exists());
}

#[test]
fn export_mesh_writes_vertex_and_face_records_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bent.json", BENT);
    let obj = tmp.path().join("tube.obj");
    ok(bin().arg("export-mesh").arg(&cfg).arg("--out").arg(&obj).output().unwrap());
    let text = fs::read_to_string(&obj).unwrap();
    let (mut v, mut f) = (0usize, Vec::new());
    for line in text.lines() {
        let mut it = line.split(' ');
        match it.next() {
            Some("v") => {
                let xyz: Vec<f64> = it.map(|x| x.parse().unwrap()).collect();
                assert_eq!(xyz.len(), 3);
                v += 1;
            }
            Some("f") => f.push(it.map(|x| x.parse::<usize>().unwrap()).collect::<Vec<_>>()),
            other => panic!("unexpected record {other:?}"),
        }
    }
    let rings = (2.0 * 4.0 / 0.25) as usize + 1;
    assert_eq!(v, rings * twistguide_lab::mesh::RING_SEGMENTS);
    assert_eq!(f.len(), 2 * (rings - 1) * twistguide_lab::mesh::RING_SEGMENTS);
    assert!(f.iter().flatten().all(|&i| i >= 1 && i <= v));
}
