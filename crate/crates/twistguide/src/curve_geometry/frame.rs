use alloc::format;
use alloc::vec::Vec;

use super::CurvatureProfile;
use crate::error::{Error, Result};
use crate::math;

pub type Vec3 = [f64; 3];
/// Rows `e1, e2, e3`.
pub type Frame = [Vec3; 3];

/// Gram defect beyond which a frame integration is rejected.
pub const DRIFT_LIMIT: f64 = 1e-6;

/// RK4 samples of the curve `Gamma` and its Frenet-type frame.
#[derive(Debug, Clone)]
pub struct FrameField {
    s0: f64,
    ds: f64,
    gamma: Vec<Vec3>,
    frames: Vec<Frame>,
}

#[inline]
fn add(a: Vec3, b: Vec3, c: f64) -> Vec3 {
    [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]]
}

#[derive(Clone, Copy)]
struct State {
    g: Vec3,
    e: Frame,
}

impl State {
    fn axpy(&self, d: &State, c: f64) -> State {
        State { g: add(self.g, d.g, c), e: [add(self.e[0], d.e[0], c), add(self.e[1], d.e[1], c), add(self.e[2], d.e[2], c)] }
    }
}

fn rhs(p: &CurvatureProfile, s: f64, x: &State) -> State {
    let (k1, k2) = (p.kappa1(s), p.kappa2(s));
    let [e1, e2, e3] = x.e;
    State {
        g: e1,
        e: [
            [k1 * e2[0], k1 * e2[1], k1 * e2[2]],
            [-k1 * e1[0] + k2 * e3[0], -k1 * e1[1] + k2 * e3[1], -k1 * e1[2] + k2 * e3[2]],
            [-k2 * e2[0], -k2 * e2[1], -k2 * e2[2]],
        ],
    }
}

/// Integrates `e' = K e`, `Gamma' = e1` from `range.0` (identity frame,
/// `Gamma = (range.0, 0, 0)`) to `range.1` with classical RK4 of step `ds`.
pub fn integrate_frame(profile: &CurvatureProfile, ds: f64, range: (f64, f64)) -> Result<FrameField> {
    if !(ds > 0.0) || !(range.1 > range.0) {
        return Err(Error::param("ds", format!("step {ds} over ({}, {}) is not a valid grid", range.0, range.1)));
    }
    let n = math::ceil((range.1 - range.0) / ds - 1e-9) as usize + 1;
    let mut x = State { g: [range.0, 0.0, 0.0], e: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] };
    let mut gamma = Vec::with_capacity(n);
    let mut frames = Vec::with_capacity(n);
    gamma.push(x.g);
    frames.push(x.e);
    for i in 1..n {
        let s = range.0 + (i - 1) as f64 * ds;
        let k1 = rhs(profile, s, &x);
        let k2 = rhs(profile, s + 0.5 * ds, &x.axpy(&k1, 0.5 * ds));
        let k3 = rhs(profile, s + 0.5 * ds, &x.axpy(&k2, 0.5 * ds));
        let k4 = rhs(profile, s + ds, &x.axpy(&k3, ds));
        x = x.axpy(&k1, ds / 6.0).axpy(&k2, ds / 3.0).axpy(&k3, ds / 3.0).axpy(&k4, ds / 6.0);
        gamma.push(x.g);
        frames.push(x.e);
    }
    let f = FrameField { s0: range.0, ds, gamma, frames };
    let drift = f.gram_defect();
    if !(drift <= DRIFT_LIMIT) {
        return Err(Error::OrthonormalityDrift { drift, tolerance: DRIFT_LIMIT });
    }
    Ok(f)
}

impl FrameField {
    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s0 + i as f64 * self.ds
    }

    pub fn gamma(&self, i: usize) -> Vec3 {
        self.gamma[i]
    }

    pub fn frame(&self, i: usize) -> Frame {
        self.frames[i]
    }

    /// Nearest sample index to `s`, clamped to the grid.
    pub fn index_at(&self, s: f64) -> usize {
        let k = math::round((s - self.s0) / self.ds);
        (k.max(0.0) as usize).min(self.len() - 1)
    }

    /// `max_i max_jk |E E^T - I|_jk`
    pub fn gram_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for e in &self.frames {
            for j in 0..3 {
                for k in 0..3 {
                    let d: f64 = (0..3).map(|m| e[j][m] * e[k][m]).sum();
                    worst = worst.max((d - if j == k { 1.0 } else { 0.0 }).abs());
                }
            }
        }
        worst
    }

    /// Rotated normals `N_mu = R^theta_{mu nu} e_nu` at sample `i`.
    pub fn normals(&self, profile: &CurvatureProfile, i: usize) -> (Vec3, Vec3) {
        let th = profile.theta(self.s(i));
        let (c, s) = (math::cos(th), math::sin(th));
        let [_, e2, e3] = self.frames[i];
        (add([c * e2[0], c * e2[1], c * e2[2]], e3, -s), add([s * e2[0], s * e2[1], s * e2[2]], e3, c))
    }

    /// `L(s_i, t) = Gamma + t_mu N_mu`
    pub fn tube_point(&self, profile: &CurvatureProfile, i: usize, t: [f64; 2]) -> Vec3 {
        let (n2, n3) = self.normals(profile, i);
        add(add(self.gamma[i], n2, t[0]), n3, t[1])
    }
}
