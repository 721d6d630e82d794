use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use twistguide::cross_section::Shape;
use twistguide::curve_geometry::{make_profile, Bump, BumpKind, CurvatureProfile, ProfileSpec};
use twistguide::hardy_constants::MinSigmaPower;
use twistguide::stability_thresholds::SweepMode;
use twistguide::waveguide_operators::EndCondition;

use crate::error::LabError;

/// One experiment: a tube, its discretization and the task to run on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Identifier used in file contents and the default output path.
    pub name: String,
    pub cross_section: ShapeConfig,
    #[serde(default)]
    pub profile: ProfileConfig,
    /// Truncation `L`; the tube is `(-L, L)`.
    pub half_length: f64,
    pub resolution: Resolution,
    #[serde(default)]
    pub ends: Ends,
    pub task: Task,
    /// Output directory; relative paths resolve against the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    /// Transverse mesh width.
    pub delta: f64,
    /// Longitudinal slab width.
    pub ds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeConfig {
    Rectangle {
        width: f64,
        height: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Disk {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Ellipse {
        semi_axes: [f64; 2],
        #[serde(default)]
        center: [f64; 2],
    },
    Polygon { vertices: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpShape {
    #[default]
    Cos2,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpConfig {
    #[serde(default)]
    pub kind: BumpShape,
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

fn default_sampling() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    #[serde(default)]
    pub kappa1: Vec<BumpConfig>,
    #[serde(default)]
    pub kappa2: Vec<BumpConfig>,
    #[serde(default)]
    pub theta_dot: Vec<BumpConfig>,
    /// The interval `I` carrying the bend.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    /// Sampling step of the curvature functions.
    #[serde(default = "default_sampling")]
    pub sampling: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self { kappa1: vec![], kappa2: vec![], theta_dot: vec![], interval: None, sampling: default_sampling() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ends {
    #[default]
    Dirichlet,
    Transparent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Power {
    #[default]
    Squared,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Scale `kappa1` only.
    Bend,
    /// Scale `kappa1` and `kappa2` together.
    BendAndTorsion,
}

fn default_count() -> usize {
    5
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    /// `E1`, `E2` of the section, optionally on a refinement ladder.
    GroundPair {
        #[serde(default)]
        deltas: Vec<f64>,
    },
    /// The twisting constant on a refinement ladder.
    Lambda {
        #[serde(default)]
        deltas: Vec<f64>,
    },
    /// Eigenvalues of the bent tube below `E1`.
    Spectrum {
        #[serde(default)]
        lengths: Vec<f64>,
        #[serde(default = "default_count")]
        max_count: usize,
        /// Positions `s` whose slab is exported for every eigenvector.
        #[serde(default)]
        slices: Vec<f64>,
    },
    /// Weighted eigenvalue of the twisted tube against the explicit bound.
    Hardy {
        #[serde(default)]
        s0: f64,
        #[serde(default)]
        lengths: Vec<f64>,
        /// Extra far-field slabs; needs transparent ends.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        far_field: Option<usize>,
        #[serde(default)]
        power: Power,
    },
    /// Bend-strength sweep with the proved threshold.
    Sweep {
        mode: SweepKind,
        ks: Vec<f64>,
        #[serde(default)]
        lengths: Vec<f64>,
        /// Add `k = epsilon` to the sweep when the threshold exists.
        #[serde(default = "yes")]
        include_epsilon: bool,
    },
    /// Smallness condition for global injectivity plus a centre-line scan.
    Injectivity {
        #[serde(default = "yes")]
        scan: bool,
    },
    /// Hardy and threshold ledgers without any eigenvalue solve.
    Constants {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s0: Option<f64>,
        #[serde(default)]
        power: Power,
    },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::GroundPair { .. } => "ground_pair",
            Task::Lambda { .. } => "lambda",
            Task::Spectrum { .. } => "spectrum",
            Task::Hardy { .. } => "hardy",
            Task::Sweep { .. } => "sweep",
            Task::Injectivity { .. } => "injectivity",
            Task::Constants { .. } => "constants",
        }
    }
}

struct Checker(Vec<(String, String)>);

impl Checker {
    fn positive(&mut self, field: impl Into<String>, x: f64) {
        if !(x > 0.0 && x.is_finite()) {
            self.0.push((field.into(), format!("must be positive and finite, got {x}")));
        }
    }

    fn finite(&mut self, field: impl Into<String>, x: f64) {
        if !x.is_finite() {
            self.0.push((field.into(), format!("must be finite, got {x}")));
        }
    }

    fn fail(&mut self, field: impl Into<String>, reason: impl Into<String>) {
        self.0.push((field.into(), reason.into()));
    }

    fn positives(&mut self, field: &str, xs: &[f64]) {
        for (i, &x) in xs.iter().enumerate() {
            self.positive(format!("{field}[{i}]"), x);
        }
    }

    fn bumps(&mut self, field: &str, bumps: &[BumpConfig]) {
        for (i, b) in bumps.iter().enumerate() {
            self.positive(format!("{field}[{i}].width"), b.width);
            self.finite(format!("{field}[{i}].center"), b.center);
            self.finite(format!("{field}[{i}].amplitude"), b.amplitude);
        }
    }
}

impl Scenario {
    /// Parses and validates a JSON scenario.
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let sc: Scenario = serde_json::from_str(text).map_err(|e| LabError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// SHA-256 of the compact serialization; formatting of the source file
    /// does not enter.
    pub fn hash(&self) -> String {
        format!("{:x}", Sha256::digest(serde_json::to_vec(self).expect("scenario serializes")))
    }

    /// Every invariant violation, named by its field path.
    pub fn validate(&self) -> Result<(), LabError> {
        let mut c = Checker(Vec::new());
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            c.fail("name", "must be non-empty and free of path separators");
        }
        c.positive("resolution.delta", self.resolution.delta);
        c.positive("resolution.ds", self.resolution.ds);
        c.positive("half_length", self.half_length);
        match &self.cross_section {
            ShapeConfig::Rectangle { width, height, .. } => {
                c.positive("cross_section.width", *width);
                c.positive("cross_section.height", *height);
            }
            ShapeConfig::Disk { radius, .. } => c.positive("cross_section.radius", *radius),
            ShapeConfig::Ellipse { semi_axes, .. } => {
                c.positive("cross_section.semi_axes[0]", semi_axes[0]);
                c.positive("cross_section.semi_axes[1]", semi_axes[1]);
            }
            ShapeConfig::Polygon { vertices } => {
                if vertices.len() < 3 || self.shape().area() <= 0.0 {
                    c.fail("cross_section.vertices", "need at least three vertices enclosing positive area");
                }
            }
        }
        let p = &self.profile;
        c.positive("profile.sampling", p.sampling);
        c.bumps("profile.kappa1", &p.kappa1);
        c.bumps("profile.kappa2", &p.kappa2);
        c.bumps("profile.theta_dot", &p.theta_dot);
        if let Some([a, b]) = p.interval {
            if !(b > a) {
                c.fail("profile.interval", format!("[{a}, {b}] is empty"));
            }
        }
        match &self.task {
            Task::GroundPair { deltas } | Task::Lambda { deltas } => c.positives("task.deltas", deltas),
            Task::Spectrum { lengths, max_count, slices } => {
                c.positives("task.lengths", lengths);
                if *max_count == 0 {
                    c.fail("task.max_count", "must be at least 1");
                }
                for (i, &s) in slices.iter().enumerate() {
                    c.finite(format!("task.slices[{i}]"), s);
                }
            }
            Task::Hardy { s0, lengths, far_field, .. } => {
                c.finite("task.s0", *s0);
                c.positives("task.lengths", lengths);
                if far_field.is_some() && self.ends != Ends::Transparent {
                    c.fail("task.far_field", "needs transparent ends");
                }
                if !p.kappa1.is_empty() {
                    c.fail("profile.kappa1", "the hardy task needs a straight axis");
                }
                if p.kappa2.is_empty() && p.theta_dot.is_empty() {
                    c.fail("profile.theta_dot", "the hardy task needs a twist");
                }
            }
            Task::Sweep { ks, lengths, .. } => {
                if ks.is_empty() {
                    c.fail("task.ks", "must not be empty");
                }
                for (i, &k) in ks.iter().enumerate() {
                    if !(k >= 0.0 && k.is_finite()) {
                        c.fail(format!("task.ks[{i}]"), format!("must be non-negative, got {k}"));
                    }
                }
                c.positives("task.lengths", lengths);
                if p.kappa1.is_empty() {
                    c.fail("profile.kappa1", "the sweep scales a bend and needs one");
                }
            }
            Task::Injectivity { .. } => {}
            Task::Constants { s0, .. } => {
                if let Some(s0) = s0 {
                    c.finite("task.s0", *s0);
                }
            }
        }
        if c.0.is_empty() && self.resolution.ds > 0.0 {
            for l in self.lengths() {
                let cells = 2.0 * l / self.resolution.ds;
                if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) || cells.round() < 4.0 {
                    c.fail("half_length", format!("2L/ds = {cells} must be an integer of at least 4 (L = {l})"));
                }
            }
        }
        if c.0.is_empty() {
            if let Err(e) = make_profile(self.profile_spec()) {
                c.fail("profile", e.to_string());
            }
        }
        match c.0.into_iter().next() {
            None => Ok(()),
            Some((field, reason)) => Err(LabError::Invalid { field, reason }),
        }
    }

    pub fn shape(&self) -> Shape {
        match self.cross_section.clone() {
            ShapeConfig::Rectangle { width, height, center } => Shape::Rectangle { width, height, center },
            ShapeConfig::Disk { radius, center } => Shape::Disk { radius, center },
            ShapeConfig::Ellipse { semi_axes, center } => Shape::Ellipse { semi_axes, center },
            ShapeConfig::Polygon { vertices } => Shape::Polygon { vertices },
        }
    }

    pub fn profile_spec(&self) -> ProfileSpec {
        let bumps = |v: &[BumpConfig]| {
            v.iter()
                .map(|b| Bump {
                    kind: match b.kind {
                        BumpShape::Cos2 => BumpKind::CosSquared,
                        BumpShape::Poly => BumpKind::Polynomial,
                    },
                    center: b.center,
                    width: b.width,
                    amplitude: b.amplitude,
                })
                .collect()
        };
        let p = &self.profile;
        ProfileSpec {
            kappa1: bumps(&p.kappa1),
            kappa2: bumps(&p.kappa2),
            theta_dot: bumps(&p.theta_dot),
            interval: p.interval.map(|[a, b]| (a, b)),
            ds: p.sampling,
        }
    }

    pub fn curvature_profile(&self) -> Result<CurvatureProfile, LabError> {
        Ok(make_profile(self.profile_spec())?)
    }

    pub fn end_condition(&self) -> EndCondition {
        match self.ends {
            Ends::Dirichlet => EndCondition::Dirichlet,
            Ends::Transparent => EndCondition::Transparent,
        }
    }

    /// Truncation lengths of the task, `half_length` when none are listed.
    pub fn lengths(&self) -> Vec<f64> {
        match &self.task {
            Task::Spectrum { lengths, .. } | Task::Hardy { lengths, .. } | Task::Sweep { lengths, .. } if !lengths.is_empty() => lengths.clone(),
            _ => vec![self.half_length],
        }
    }

    /// Transverse widths of the task, `resolution.delta` when none are listed.
    pub fn deltas(&self) -> Vec<f64> {
        match &self.task {
            Task::GroundPair { deltas } | Task::Lambda { deltas } if !deltas.is_empty() => deltas.clone(),
            _ => vec![self.resolution.delta],
        }
    }
}

impl From<Power> for MinSigmaPower {
    fn from(p: Power) -> Self {
        match p {
            Power::Squared => MinSigmaPower::Squared,
            Power::Linear => MinSigmaPower::Linear,
        }
    }
}

impl From<SweepKind> for SweepMode {
    fn from(k: SweepKind) -> Self {
        match k {
            SweepKind::Bend => SweepMode::Bend,
            SweepKind::BendAndTorsion => SweepMode::BendAndTorsion,
        }
    }
}
