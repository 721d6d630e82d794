//! Scenario files, CSV/JSON/OBJ output and the command-line driver for
//! [`twistguide`].
//!
//! A scenario is one JSON document naming a cross-section, a curvature
//! profile, the discretization and a task. [`run_scenario`] computes in
//! memory; [`run_config`] also resolves the output directory and writes the
//! files together with a manifest of their SHA-256 hashes.

mod error;
pub mod mesh;
pub mod output;
pub mod report;
pub mod results;
mod run;
pub mod scenario;

use std::fs;
use std::path::{Path, PathBuf};

pub use error::LabError;
pub use output::{Artifact, Manifest, ManifestEntry, Table, MANIFEST_FILE};
pub use report::render;
pub use results::Results;
pub use run::{exact_e1, run_scenario, section_info, RunOptions, RunOutput};
pub use scenario::Scenario;

/// Environment variable naming the root of default output directories.
pub const OUTPUT_ENV: &str = "TWISTGUIDE_OUT";

pub fn load_scenario(path: &Path) -> Result<Scenario, LabError> {
    let text = fs::read_to_string(path).map_err(error::io(path))?;
    Scenario::from_json(&text)
}

/// `--out`, else the scenario's `output` (relative to the config file), else
/// `$TWISTGUIDE_OUT/<name>`, else `twistguide-out/<name>`.
pub fn output_dir(sc: &Scenario, config: &Path, flag: Option<&Path>, env_root: Option<&Path>) -> PathBuf {
    if let Some(f) = flag {
        return f.to_path_buf();
    }
    if let Some(o) = &sc.output {
        let base = config.parent().unwrap_or(Path::new(""));
        return base.join(o);
    }
    env_root.unwrap_or(Path::new("twistguide-out")).join(&sc.name)
}

/// Runs a config file and writes its artifacts; returns the directory and manifest.
pub fn run_config(config: &Path, flag: Option<&Path>, opts: &RunOptions) -> Result<(PathBuf, Manifest), LabError> {
    let sc = load_scenario(config)?;
    let env_root = std::env::var_os(OUTPUT_ENV).map(PathBuf::from);
    let dir = output_dir(&sc, config, flag, env_root.as_deref());
    let out = run_scenario(&sc, opts)?;
    let manifest = Manifest { scenario: sc.name.clone(), scenario_hash: sc.hash(), task: sc.task.name().into(), seed: opts.seed, artifacts: vec![] };
    let manifest = output::write_artifacts(&dir, manifest, &out.artifacts)?;
    Ok((dir, manifest))
}

/// Checks the manifest's hashes and renders the recorded results.
pub fn report_manifest(path: &Path) -> Result<String, LabError> {
    let m = Manifest::load(path)?;
    let dir = path.parent().unwrap_or(Path::new(""));
    m.verify(dir)?;
    let entry = m.entry("results.json").ok_or_else(|| LabError::Manifest("no results.json listed".into()))?;
    let p = dir.join(&entry.path);
    let text = fs::read_to_string(&p).map_err(error::io(&p))?;
    let results: Results = serde_json::from_str(&text).map_err(|e| LabError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    Ok(render(&results))
}
