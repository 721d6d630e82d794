use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ledger::{constants_ledger, epsilon_threshold, EpsilonThreshold, KShares, ThresholdLedger, ThresholdMode};
use crate::curve_geometry::{check_injectivity, CurvatureProfile, InjectivityVerdict};
use crate::error::{Error, Result};
use crate::hardy_constants::{ConstantsLedger, MinSigmaPower, SigmaDecomposition};
use crate::waveguide_operators::{assemble_q, eigenvalues_below_threshold, SpectralOptions, TruncatedTubeGrid};

/// Which curvatures the bend strength `k` scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// `kappa1` only; `k = ||kappa1|| + ||kappa1'||`.
    Bend,
    /// `kappa1` and `kappa2` together; `k = ||kappa1|| + ||kappa1'|| + ||kappa2||`.
    BendAndTorsion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: f64,
    pub half_length: f64,
    pub lowest: Option<f64>,
    pub count_below: usize,
    pub threshold: f64,
    pub within_epsilon: bool,
    pub injectivity: InjectivityVerdict,
    /// Reason the row was not solved (immersion violated).
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub mode: SweepMode,
    pub rows: Vec<SweepRow>,
    /// `||kappa1'|| / ||kappa1||` of the fixed bump shape.
    pub derivative_ratio: f64,
    /// `k` per unit amplitude factor of the shape family.
    pub k_per_unit: f64,
    pub epsilon: Option<f64>,
}

impl SweepTable {
    /// Smallest `k` with an eigenvalue below `E1` at some length.
    pub fn onset(&self) -> Option<f64> {
        self.rows.iter().filter(|r| r.count_below > 0).map(|r| r.k).reduce(f64::min)
    }

    /// No length shows a bound state at some `k` and none at a larger one.
    pub fn monotone(&self) -> bool {
        let mut lengths: Vec<f64> = self.rows.iter().map(|r| r.half_length).collect();
        lengths.sort_by(f64::total_cmp);
        lengths.dedup();
        lengths.iter().all(|&l| {
            let mut seen = false;
            let mut rows: Vec<&SweepRow> = self.rows.iter().filter(|r| r.half_length == l && r.skipped.is_none()).collect();
            rows.sort_by(|a, b| a.k.total_cmp(&b.k));
            rows.iter().all(|r| {
                seen |= r.count_below > 0;
                !seen || r.count_below > 0
            })
        })
    }

    /// No bound state for any `k <= epsilon`.
    pub fn stable_below_epsilon(&self) -> bool {
        self.rows.iter().filter(|r| r.within_epsilon).all(|r| r.count_below == 0 && r.skipped.is_none())
    }

    /// The empirical onset is not below the proved threshold.
    pub fn conservative(&self) -> Option<bool> {
        let eps = self.epsilon?;
        Some(self.onset().map_or(true, |kc| kc >= eps))
    }
}

/// Strength `k` of a profile under the sweep definition.
pub fn bend_strength(p: &CurvatureProfile, mode: SweepMode) -> f64 {
    let n = p.norms();
    match mode {
        SweepMode::Bend => n.kappa1 + n.kappa1_dot,
        SweepMode::BendAndTorsion => n.kappa1 + n.kappa1_dot + n.kappa2,
    }
}

/// Rescales `base` to strength `k`, keeping the bump shapes.
pub fn profile_at_strength(base: &CurvatureProfile, mode: SweepMode, k: f64) -> Result<CurvatureProfile> {
    let unit = bend_strength(base, mode);
    if !(unit > 0.0) {
        return Err(Error::param("profile", "the shape family has zero strength"));
    }
    let c = k / unit;
    match mode {
        SweepMode::Bend => base.scaled(c, 1.0),
        SweepMode::BendAndTorsion => base.scaled(c, c),
    }
}

/// Lowest eigenvalue below `E1` of the bent tube for each strength and length.
pub fn bend_sweep(
    base: &CurvatureProfile,
    mode: SweepMode,
    ks: &[f64],
    grid: &TruncatedTubeGrid,
    lengths: &[f64],
    epsilon: Option<f64>,
    opts: &SpectralOptions,
) -> Result<SweepTable> {
    let n = base.norms();
    let a = grid.transverse().domain().shape().radius_about_origin();
    let mut rows = Vec::with_capacity(ks.len() * lengths.len());
    for &k in ks {
        let p = profile_at_strength(base, mode, k)?;
        let injectivity = check_injectivity(&p, a).verdict;
        for &l in lengths {
            let g = grid.with_half_length(l)?;
            let mut row = SweepRow {
                k,
                half_length: l,
                lowest: None,
                count_below: 0,
                threshold: g.transverse().e1(),
                within_epsilon: epsilon.is_some_and(|e| k <= e),
                injectivity,
                skipped: None,
            };
            match assemble_q(&g, &p) {
                Ok(form) => {
                    let res = eigenvalues_below_threshold(&form, opts)?;
                    row.lowest = res.values.first().copied();
                    row.count_below = res.count_below;
                }
                Err(e @ Error::ImmersionViolation { .. }) => row.skipped = Some(e.to_string()),
                Err(e) => return Err(e),
            }
            rows.push(row);
        }
    }
    let derivative_ratio = if n.kappa1 > 0.0 { n.kappa1_dot / n.kappa1 } else { 0.0 };
    Ok(SweepTable { mode, rows, derivative_ratio, k_per_unit: bend_strength(base, mode), epsilon })
}

/// Everything that goes into `epsilon` for one shape family.
#[derive(Debug, Clone)]
pub struct SweepEpsilon {
    pub hardy: ConstantsLedger,
    pub ledger: ThresholdLedger,
    pub threshold: EpsilonThreshold,
    pub shares: KShares,
}

/// Twist entering the Hardy bound of a sweep family: `thetadot - kappa2` when
/// only the bend is scaled, `thetadot` alone when the torsion is scaled too.
pub fn sweep_sigma(p: &CurvatureProfile, mode: SweepMode) -> (impl Fn(f64) -> f64 + '_, impl Fn(f64) -> f64 + '_) {
    let bend = mode == SweepMode::Bend;
    let sigma = move |s: f64| if bend { p.theta_dot(s) - p.kappa2(s) } else { p.theta_dot(s) };
    let sigma_dot = move |s: f64| if bend { p.theta_ddot(s) - p.kappa2_dot(s) } else { p.theta_ddot(s) };
    (sigma, sigma_dot)
}

/// Proved threshold for the family `base` under `mode`, with the Hardy bound
/// evaluated for the family's twist on a section with constant `lambda`,
/// radius `a` and threshold `e1`.
pub fn sweep_epsilon(base: &CurvatureProfile, mode: SweepMode, lambda: f64, a: f64, e1: f64) -> Result<SweepEpsilon> {
    let unit = bend_strength(base, mode);
    if !(unit > 0.0) {
        return Err(Error::param("profile", "the shape family has zero strength"));
    }
    let (sigma, sigma_dot) = sweep_sigma(base, mode);
    let ds = base.ds();
    let hull = base.active_interval().ok_or_else(|| Error::param("profile", "no curvature or twist"))?;
    let decomp = SigmaDecomposition::new(&sigma, &sigma_dot, (hull.0 - 0.5, hull.1 + 0.5), ds)?;
    let hardy = ConstantsLedger::evaluate(&decomp, &sigma, lambda, a, None, MinSigmaPower::Squared)?;
    let n = base.norms();
    let (tmode, shares) = match mode {
        SweepMode::Bend => (ThresholdMode::Twisted { shear: n.shear }, KShares { kappa1: n.kappa1 / unit, kappa2: 0.0 }),
        SweepMode::BendAndTorsion => (ThresholdMode::MildTorsion { kappa2: None }, KShares { kappa1: n.kappa1 / unit, kappa2: n.kappa2 / unit }),
    };
    let ledger = constants_ledger(tmode, a, n.theta_dot);
    let interval = base.interval().unwrap_or(hull);
    let threshold = epsilon_threshold(&ledger, hardy.c_h, e1, interval, hardy.s0, shares, ds)?;
    Ok(SweepEpsilon { hardy, ledger, threshold, shares })
}
