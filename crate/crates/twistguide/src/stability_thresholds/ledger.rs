use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, sq};

/// Safety margin on the strict inequality `k < 1 / C6`.
pub const ETA: f64 = 1e-6;

/// Which stability statement the constants serve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdMode {
    /// Bent tube with an effective twist `kappa2 - thetadot`, `k = ||kappa1|| + ||kappa1'||`.
    Twisted { shear: f64 },
    /// Bent tube with mild torsion, `k = ||kappa1|| + ||kappa1'|| + ||kappa2||`.
    /// `None` uses the restriction `||kappa2|| < 1/a` in place of the measured norm.
    MildTorsion { kappa2: Option<f64> },
}

impl ThresholdMode {
    pub fn k_definition(&self) -> &'static str {
        match self {
            ThresholdMode::Twisted { .. } => "k = ||kappa1|| + ||kappa1'||",
            ThresholdMode::MildTorsion { .. } => "k = ||kappa1|| + ||kappa1'|| + ||kappa2||",
        }
    }
}

/// `C1 .. C7` of the perturbative comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdLedger {
    pub mode: ThresholdMode,
    pub a: f64,
    pub theta_dot: f64,
    /// `C[0] = C1`, ..., `C[6] = C7`.
    pub c: [f64; 7],
}

/// Builds `C1 .. C7` from the sup norms.
///
/// Twisted: `C1 = 6a(1 + a||kappa2 - thetadot||)^2`, `C3 = 1 + a r + a^2 r^2`.
/// Mild torsion: `C1 = 6a(1 + a||kappa2|| + a||thetadot||)^2`, `C3 = max{2, 1 + 2a^2||thetadot||^2}`.
/// Both: `C2 = 1 + a(1 + ||thetadot||)`, `C4 = 3 C1 C3`, `C5 = C2 sqrt(3 C3 (1 + C4))`,
/// `C6 = 1 + C4`, `C7 = 2 C5^2`.
pub fn constants_ledger(mode: ThresholdMode, a: f64, theta_dot: f64) -> ThresholdLedger {
    let (c1, c3) = match mode {
        ThresholdMode::Twisted { shear } => (6.0 * a * sq(1.0 + a * shear), 1.0 + a * shear + a * a * shear * shear),
        ThresholdMode::MildTorsion { kappa2 } => {
            // with ||kappa2|| < 1/a the product a||kappa2|| is below one
            let ak2 = kappa2.map_or(1.0, |k| a * k);
            (6.0 * a * sq(1.0 + ak2 + a * theta_dot), (1.0 + 2.0 * a * a * theta_dot * theta_dot).max(2.0))
        }
    };
    let c2 = 1.0 + a * (1.0 + theta_dot);
    let c4 = 3.0 * c1 * c3;
    let c5 = c2 * math::sqrt(3.0 * c3 * (1.0 + c4));
    let c6 = 1.0 + c4;
    let c7 = 2.0 * c5 * c5;
    ThresholdLedger { mode, a, theta_dot, c: [c1, c2, c3, c4, c5, c6, c7] }
}

/// How `k` splits over the curvature norms of a scaled shape family.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KShares {
    /// `||kappa1|| / k`
    pub kappa1: f64,
    /// `||kappa2|| / k` (mild-torsion mode only).
    pub kappa2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Unit,
    Immersion,
    Kappa2Cap,
    Comparison,
    Positivity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonThreshold {
    pub epsilon: f64,
    /// Every constraint with its value; `f64::INFINITY` when inactive.
    pub branches: Vec<(Branch, f64)>,
    pub binding: Branch,
    /// `max_{s in I} (1 + (s - s0)^2)` on the sample grid.
    pub weight_max: f64,
}

/// `eps = min{1, 1/(2 a rho1), (1 - eta)/C6, c_h / (C6 c_h + (C6 E1 + C7) max_I (1 + (s - s0)^2))}`
/// plus `(1 - eta)/(a rho2)` when the mild-torsion ledger relies on `||kappa2|| < 1/a`.
pub fn epsilon_threshold(
    ledger: &ThresholdLedger,
    c_h: f64,
    e1: f64,
    interval: (f64, f64),
    s0: f64,
    shares: KShares,
    ds: f64,
) -> Result<EpsilonThreshold> {
    if !(c_h > 0.0) {
        return Err(Error::NonPositiveHardyBound { value: c_h });
    }
    if !(ds > 0.0) || !(interval.1 >= interval.0) {
        return Err(Error::param("interval", format!("{interval:?} with step {ds}")));
    }
    let [_, _, _, _, _, c6, c7] = ledger.c;
    let n = math::ceil((interval.1 - interval.0) / ds) as usize;
    let weight_max = (0..=n)
        .map(|i| interval.0 + (interval.1 - interval.0) * i as f64 / n.max(1) as f64 - s0)
        .fold(0.0f64, |m, x| m.max(1.0 + x * x));
    let inf = f64::INFINITY;
    let a = ledger.a;
    let immersion = if a > 0.0 && shares.kappa1 > 0.0 { 1.0 / (2.0 * a * shares.kappa1) } else { inf };
    let cap = match ledger.mode {
        ThresholdMode::MildTorsion { kappa2: None } if a > 0.0 && shares.kappa2 > 0.0 => (1.0 - ETA) / (a * shares.kappa2),
        _ => inf,
    };
    let branches = alloc::vec![
        (Branch::Unit, 1.0),
        (Branch::Immersion, immersion),
        (Branch::Kappa2Cap, cap),
        (Branch::Comparison, (1.0 - ETA) / c6),
        (Branch::Positivity, c_h / (c6 * c_h + (c6 * e1 + c7) * weight_max)),
    ];
    let (binding, epsilon) = branches.iter().copied().fold((Branch::Unit, inf), |b, x| if x.1 < b.1 { x } else { b });
    Ok(EpsilonThreshold { epsilon, branches, binding, weight_max })
}

/// `c_h (1 - C6 k) / (1 + (s - s0)^2) - (C6 E1 + C7) k chi_I(s)`
pub fn lower_bound_integrand(ledger: &ThresholdLedger, c_h: f64, e1: f64, interval: (f64, f64), s0: f64, k: f64, s: f64) -> f64 {
    let [_, _, _, _, _, c6, c7] = ledger.c;
    let chi = if s >= interval.0 && s <= interval.1 { 1.0 } else { 0.0 };
    c_h * (1.0 - c6 * k) / (1.0 + sq(s - s0)) - (c6 * e1 + c7) * k * chi
}
