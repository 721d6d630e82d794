//! Structured results of a run; `results.json` holds one [`Results`].

use serde::{Deserialize, Serialize};

use crate::scenario::SweepKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Results {
    pub scenario: String,
    pub scenario_hash: String,
    pub section: SectionInfo,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionInfo {
    pub description: String,
    /// `sup |t|` over the section.
    pub a: f64,
    pub area: f64,
    /// No tested rotation about the origin moves the section.
    pub rotationally_invariant: bool,
}

/// One inequality with its margin (`lhs - rhs`, nonnegative when it holds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub pass: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub name: String,
    pub value: f64,
    pub formula: String,
    pub inputs: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum Outcome {
    GroundPair(GroundOutcome),
    Lambda(LambdaOutcome),
    Spectrum(SpectrumOutcome),
    Hardy(HardyOutcome),
    Sweep(SweepOutcome),
    Injectivity(InjectivityOutcome),
    Constants(ConstantsOutcome),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundRow {
    pub delta: f64,
    pub e1: f64,
    pub e2: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundOutcome {
    pub rows: Vec<GroundRow>,
    /// Closed-form `E1` for rectangles and disks.
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaRow {
    pub delta: f64,
    pub e1: f64,
    pub lambda: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaOutcome {
    pub rows: Vec<LambdaRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub half_length: f64,
    pub count_below: usize,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub diagnostic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOutcome {
    pub e1: f64,
    pub transparent: bool,
    pub rows: Vec<SpectrumRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyRun {
    pub half_length: f64,
    pub mu: f64,
    pub residual: f64,
    pub passes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyOutcome {
    pub s0: f64,
    pub lambda: f64,
    pub e1: f64,
    pub c_h: Option<f64>,
    /// Why no bound was evaluated.
    pub unavailable: Option<String>,
    pub constants: Vec<ConstantRow>,
    pub runs: Vec<HardyRun>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRowOut {
    pub k: f64,
    pub half_length: f64,
    pub lowest: Option<f64>,
    pub count_below: usize,
    pub within_epsilon: bool,
    pub injectivity: String,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub mode: SweepKind,
    pub k_definition: String,
    pub e1: f64,
    pub lambda: f64,
    pub epsilon: Option<f64>,
    pub binding: Option<String>,
    pub unavailable: Option<String>,
    pub constants: Vec<ConstantRow>,
    pub rows: Vec<SweepRowOut>,
    pub onset: Option<f64>,
    pub monotone: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityOutcome {
    pub kappa1: f64,
    pub kappa2: f64,
    pub interval_length: f64,
    /// `max{4|I|^2 ||kappa1||^2, 4a(||kappa1|| + ||kappa2||)}`
    pub condition: f64,
    /// `a ||kappa1||`
    pub immersion: f64,
    pub verdict: String,
    pub scan_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsOutcome {
    pub lambda: f64,
    pub e1: f64,
    pub constants: Vec<ConstantRow>,
    pub notes: Vec<String>,
}
