use nalgebra::Matrix3;

use super::CurvatureProfile;
use crate::error::{Error, Result};
use crate::math;

/// Closed-form metric of the tube map at one point `(s, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    /// `h = 1 - (t2 cos theta + t3 sin theta) kappa1`
    pub h: f64,
    /// Shift components `h2 = -t3 (kappa2 - thetadot)`, `h3 = t2 (kappa2 - thetadot)`.
    pub shift: [f64; 2],
    pub g: Matrix3<f64>,
    pub g_inv: Matrix3<f64>,
    /// `d_i F` with `F = log(h) / 2`.
    pub grad_f: [f64; 3],
    /// `d_tau F = t3 d2 F - t2 d3 F`
    pub tau_f: f64,
}

/// Fails when `h <= 0` (the tube map is not an immersion there).
pub fn metric_at(p: &CurvatureProfile, s: f64, t: [f64; 2]) -> Result<MetricSample> {
    let th = p.theta(s);
    let (c, sn) = (math::cos(th), math::sin(th));
    let (k1, k1d, td) = (p.kappa1(s), p.kappa1_dot(s), p.theta_dot(s));
    let rho = p.kappa2(s) - td;
    let along = t[0] * c + t[1] * sn;
    let across = -t[0] * sn + t[1] * c;
    let h = 1.0 - along * k1;
    if !(h > 0.0) {
        return Err(Error::ImmersionViolation { product: along * k1 });
    }
    let (h2, h3) = (-t[1] * rho, t[0] * rho);
    let g = Matrix3::new(h * h + h2 * h2 + h3 * h3, h2, h3, h2, 1.0, 0.0, h3, 0.0, 1.0);
    let ih2 = 1.0 / (h * h);
    let g_inv = Matrix3::new(
        ih2,
        -h2 * ih2,
        -h3 * ih2,
        -h2 * ih2,
        1.0 + h2 * h2 * ih2,
        h2 * h3 * ih2,
        -h3 * ih2,
        h2 * h3 * ih2,
        1.0 + h3 * h3 * ih2,
    );
    let d1h = -(across * td * k1 + along * k1d);
    let (d2h, d3h) = (-c * k1, -sn * k1);
    let grad_f = [d1h / (2.0 * h), d2h / (2.0 * h), d3h / (2.0 * h)];
    let tau_f = t[1] * grad_f[1] - t[0] * grad_f[2];
    Ok(MetricSample { h, shift: [h2, h3], g, g_inv, grad_f, tau_f })
}

impl MetricSample {
    /// `G^{-1} - diag(0, 1, 1)`, positive semidefinite of rank one.
    pub fn excess(&self) -> Matrix3<f64> {
        self.g_inv - Matrix3::from_diagonal(&nalgebra::Vector3::new(0.0, 1.0, 1.0))
    }

    /// `w^T G^{-1} w` written as `h^{-2} (w1 - h_mu w_mu)^2 + w2^2 + w3^2`.
    pub fn inverse_form(&self, w: [f64; 3]) -> f64 {
        let x = w[0] - self.shift[0] * w[1] - self.shift[1] * w[2];
        x * x / (self.h * self.h) + w[1] * w[1] + w[2] * w[2]
    }
}
