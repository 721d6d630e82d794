use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io, LabError, LOCK_FILE};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Shortest decimal string that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// A file produced by a run, still in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Self { name: name.into(), bytes: bytes.into() }
    }

    pub fn csv(name: impl Into<String>, table: &Table) -> Self {
        Self::new(name, table.to_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Index of one output directory. It lists every file except itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: String,
    pub scenario_hash: String,
    pub task: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub artifacts: Vec<ManifestEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

impl Manifest {
    pub fn entry(&self, name: &str) -> Option<&ManifestEntry> {
        self.artifacts.iter().find(|a| a.path == name)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = fs::read_to_string(path).map_err(io(path))?;
        serde_json::from_str(&text).map_err(|e| LabError::Parse { line: e.line(), column: e.column(), message: e.to_string() })
    }

    /// Re-hashes every listed file next to the manifest.
    pub fn verify(&self, dir: &Path) -> Result<(), LabError> {
        for a in &self.artifacts {
            let p = dir.join(&a.path);
            let bytes = fs::read(&p).map_err(io(&p))?;
            if sha256_hex(&bytes) != a.sha256 {
                return Err(LabError::Manifest(format!("{} does not match its recorded hash", a.path)));
            }
        }
        Ok(())
    }
}

/// Holds the output directory for one run; released on drop.
struct DirLock(PathBuf);

impl DirLock {
    fn acquire(dir: &Path) -> Result<Self, LabError> {
        let p = dir.join(LOCK_FILE);
        match fs::OpenOptions::new().write(true).create_new(true).open(&p) {
            Ok(_) => Ok(Self(p)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(LabError::Busy(dir.to_path_buf())),
            Err(e) => Err(LabError::Io { path: p, source: e }),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

/// Writes the artifacts and their manifest into `dir`.
pub fn write_artifacts(dir: &Path, mut manifest: Manifest, artifacts: &[Artifact]) -> Result<Manifest, LabError> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let _lock = DirLock::acquire(dir)?;
    manifest.artifacts.clear();
    for a in artifacts {
        let p = dir.join(&a.name);
        fs::write(&p, &a.bytes).map_err(io(&p))?;
        manifest.artifacts.push(ManifestEntry { path: a.name.clone(), sha256: sha256_hex(&a.bytes), bytes: a.bytes.len() as u64 });
    }
    let p = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&p, text).map_err(io(&p))?;
    Ok(manifest)
}
