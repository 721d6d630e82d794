use super::{CurvatureProfile, FrameField};
use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InjectivityVerdict {
    /// The sufficient smallness condition holds.
    Certified,
    /// Immersion holds but the sufficient condition does not; nothing is claimed.
    Inconclusive,
    /// `a ||kappa1|| >= 1`.
    ImmersionViolated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectivityReport {
    /// `(||kappa1||, ||kappa1|| + ||kappa2||, ||kappa2||)`
    pub k: [f64; 3],
    /// `max{4 |I|^2 ||kappa1||^2, 4 a (||kappa1|| + ||kappa2||)}`
    pub condition: f64,
    pub immersion: f64,
    pub verdict: InjectivityVerdict,
    /// Smallest `|Gamma(s) - Gamma(s')| / (2a)` over sample pairs with
    /// `|s - s'| >= pi a`, when a scan was run.
    pub scan_ratio: Option<f64>,
}

pub fn check_injectivity(p: &CurvatureProfile, a: f64) -> InjectivityReport {
    let n = p.norms();
    let len = p.interval().map_or(0.0, |(x, y)| y - x);
    let condition = (4.0 * len * len * n.kappa1 * n.kappa1).max(4.0 * a * (n.kappa1 + n.kappa2));
    let immersion = a * n.kappa1;
    let verdict = if immersion >= 1.0 {
        InjectivityVerdict::ImmersionViolated
    } else if condition < 1.0 {
        InjectivityVerdict::Certified
    } else {
        InjectivityVerdict::Inconclusive
    };
    InjectivityReport { k: [n.kappa1, n.kappa1 + n.kappa2, n.kappa2], condition, immersion, verdict, scan_ratio: None }
}

/// Adds a brute-force scan of the centre curve to a report; disjoint balls of
/// radius `a` around well-separated curve points rule out self-contact.
pub fn scan_centerline(mut r: InjectivityReport, frame: &FrameField, a: f64) -> InjectivityReport {
    let gap = core::f64::consts::PI * a;
    let mut best = f64::INFINITY;
    for i in 0..frame.len() {
        for j in i + 1..frame.len() {
            if frame.s(j) - frame.s(i) < gap {
                continue;
            }
            let (x, y) = (frame.gamma(i), frame.gamma(j));
            let d = math::sqrt((0..3).map(|k| (x[k] - y[k]) * (x[k] - y[k])).sum());
            best = best.min(d / (2.0 * a));
        }
    }
    r.scan_ratio = best.is_finite().then_some(best);
    r
}

impl InjectivityReport {
    pub fn immersion_ok(&self) -> bool {
        self.immersion < 1.0
    }

    pub fn condition_ok(&self) -> bool {
        self.condition < 1.0
    }
}

/// Largest `|e_i(s2) - e_i(s1)| - 2 k_i min{|s2 - s1|, |I|}` over the given
/// sample pairs; non-positive when the frame-variation bound holds.
pub fn frame_bound_excess(frame: &FrameField, report: &InjectivityReport, interval_len: f64, pairs: impl IntoIterator<Item = (usize, usize)>) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for (i, j) in pairs {
        let (a, b) = (frame.frame(i), frame.frame(j));
        let ds = (frame.s(j) - frame.s(i)).abs().min(interval_len);
        for m in 0..3 {
            let d = math::sqrt((0..3).map(|k| (a[m][k] - b[m][k]) * (a[m][k] - b[m][k])).sum());
            worst = worst.max(d - 2.0 * report.k[m] * ds);
        }
    }
    worst
}

/// `(1 - a||kappa1||, 1 + a||kappa1||)` bounds on `h`.
pub fn ellipticity_bounds(p: &CurvatureProfile, a: f64) -> Result<(f64, f64)> {
    let product = a * p.norms().kappa1;
    if product >= 1.0 {
        return Err(Error::ImmersionViolation { product });
    }
    Ok((1.0 - product, 1.0 + product))
}
