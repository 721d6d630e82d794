use alloc::format;
use alloc::vec::Vec;

use super::bump::{eval, eval_derivative, eval_integral, Bump};
use crate::error::{Error, Result};
use crate::math;

/// Input to [`make_profile`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProfileSpec {
    pub kappa1: Vec<Bump>,
    pub kappa2: Vec<Bump>,
    /// The rotation enters through its rate; `theta = int thetadot`.
    pub theta_dot: Vec<Bump>,
    /// The interval `I` where `kappa1 > 0`; required when `kappa1` is not zero.
    pub interval: Option<(f64, f64)>,
    /// Sampling step.
    pub ds: f64,
}

/// Sup norms over the sample grid (refined around the maximizing sample).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProfileNorms {
    pub kappa1: f64,
    pub kappa1_dot: f64,
    pub kappa2: f64,
    pub theta_dot: f64,
    /// `||kappa2 - thetadot||`
    pub shear: f64,
}

/// Curvatures and rotation angle of the reference curve, analytic plus sampled.
#[derive(Debug, Clone)]
pub struct CurvatureProfile {
    spec: ProfileSpec,
    grid_start: f64,
    samples: usize,
    active: Option<(f64, f64)>,
    norms: ProfileNorms,
}

fn hull(bumps: &[Bump]) -> Option<(f64, f64)> {
    bumps.iter().filter(|b| b.amplitude != 0.0).map(|b| b.support()).reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
}

fn union(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    match (a, b) {
        (Some(x), Some(y)) => Some((x.0.min(y.0), x.1.max(y.1))),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Validates the spec and samples it.
pub fn make_profile(spec: ProfileSpec) -> Result<CurvatureProfile> {
    if !(spec.ds > 0.0) || !spec.ds.is_finite() {
        return Err(Error::param("ds", format!("{} must be positive", spec.ds)));
    }
    for (name, list) in [("kappa1", &spec.kappa1), ("kappa2", &spec.kappa2), ("theta_dot", &spec.theta_dot)] {
        if let Some(b) = list.iter().find(|b| !(b.width > 0.0) || !b.amplitude.is_finite() || !b.center.is_finite()) {
            return Err(Error::InvalidProfile(format!("{name} bump {b:?} needs positive width and finite data")));
        }
    }
    let straight = hull(&spec.kappa1).is_none();
    if let Some((a, b)) = spec.interval {
        if !(b > a) {
            return Err(Error::InvalidProfile(format!("interval ({a}, {b}) is empty")));
        }
    } else if !straight {
        return Err(Error::InvalidProfile("kappa1 is not zero but no interval I was given".into()));
    }
    let tol = 1e-12;
    if let Some((a, b)) = spec.interval {
        for (name, list) in [("kappa1", &spec.kappa1), ("kappa2", &spec.kappa2)] {
            if let Some((lo, hi)) = hull(list) {
                if lo < a - tol || hi > b + tol {
                    return Err(Error::InvalidProfile(format!("{name} support ({lo}, {hi}) leaves I = ({a}, {b})")));
                }
            }
        }
    }
    let active = union(union(hull(&spec.kappa1), hull(&spec.kappa2)), hull(&spec.theta_dot));
    let span = union(active, spec.interval).unwrap_or((-1.0, 1.0));
    let samples = (math::ceil((span.1 - span.0) / spec.ds - 1e-9) as usize).max(1) + 1;
    let mut p = CurvatureProfile { spec, grid_start: span.0, samples, active, norms: ProfileNorms::default() };
    if !straight {
        let (a, b) = p.spec.interval.unwrap();
        for i in 0..p.samples {
            let s = p.sample_s(i);
            if s > a && s < b {
                let k = p.kappa1(s);
                if !(k > 0.0) {
                    return Err(Error::InvalidProfile(format!("kappa1({s}) = {k} is not positive inside I")));
                }
            }
        }
    }
    p.norms = ProfileNorms {
        kappa1: p.sup_of(|s| p.kappa1(s)),
        kappa1_dot: p.sup_of(|s| p.kappa1_dot(s)),
        kappa2: p.sup_of(|s| p.kappa2(s)),
        theta_dot: p.sup_of(|s| p.theta_dot(s)),
        shear: p.sup_of(|s| p.kappa2(s) - p.theta_dot(s)),
    };
    Ok(p)
}

impl CurvatureProfile {
    /// Straight, untwisted reference.
    pub fn straight(ds: f64) -> Self {
        make_profile(ProfileSpec { ds, ..Default::default() }).expect("straight profile is valid")
    }

    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    pub fn ds(&self) -> f64 {
        self.spec.ds
    }

    pub fn interval(&self) -> Option<(f64, f64)> {
        self.spec.interval
    }

    /// Hull of all supports (`kappa1`, `kappa2`, `thetadot`).
    pub fn active_interval(&self) -> Option<(f64, f64)> {
        self.active
    }

    pub fn is_straight(&self) -> bool {
        hull(&self.spec.kappa1).is_none() && hull(&self.spec.kappa2).is_none()
    }

    pub fn norms(&self) -> ProfileNorms {
        self.norms
    }

    pub fn kappa1(&self, s: f64) -> f64 {
        eval(&self.spec.kappa1, s)
    }

    pub fn kappa1_dot(&self, s: f64) -> f64 {
        eval_derivative(&self.spec.kappa1, s)
    }

    pub fn kappa2(&self, s: f64) -> f64 {
        eval(&self.spec.kappa2, s)
    }

    pub fn kappa2_dot(&self, s: f64) -> f64 {
        eval_derivative(&self.spec.kappa2, s)
    }

    pub fn theta(&self, s: f64) -> f64 {
        eval_integral(&self.spec.theta_dot, s)
    }

    pub fn theta_dot(&self, s: f64) -> f64 {
        eval(&self.spec.theta_dot, s)
    }

    pub fn theta_ddot(&self, s: f64) -> f64 {
        eval_derivative(&self.spec.theta_dot, s)
    }

    pub fn sample_count(&self) -> usize {
        self.samples
    }

    pub fn sample_s(&self, i: usize) -> f64 {
        self.grid_start + i as f64 * self.spec.ds
    }

    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples).map(move |i| self.sample_s(i))
    }

    /// `sup |f|` over the samples, polished by golden section next to the best one.
    pub fn sup_of(&self, f: impl Fn(f64) -> f64) -> f64 {
        let (mut best, mut at) = (0.0f64, None);
        for i in 0..self.samples {
            let v = f(self.sample_s(i)).abs();
            if v > best {
                best = v;
                at = Some(i);
            }
        }
        let Some(i) = at else { return 0.0 };
        let g = (math::sqrt(5.0) - 1.0) / 2.0;
        let s0 = self.sample_s(i);
        let (mut lo, mut hi) = (s0 - self.spec.ds, s0 + self.spec.ds);
        for _ in 0..60 {
            let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if f(x1).abs() > f(x2).abs() {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        best.max(f(0.5 * (lo + hi)).abs())
    }

    /// Same shapes with `kappa1` and `kappa2` amplitudes multiplied by `c1`, `c2`.
    pub fn scaled(&self, c1: f64, c2: f64) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.kappa1.iter_mut().for_each(|b| b.amplitude *= c1);
        spec.kappa2.iter_mut().for_each(|b| b.amplitude *= c2);
        make_profile(spec)
    }
}
