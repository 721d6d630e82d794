use core::f64::consts::PI;

use crate::math::{self, sq};

/// Compactly supported bump shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpKind {
    /// `cos^2(pi (s - c) / w)` on `|s - c| < w / 2`.
    CosSquared,
    /// `(1 - u^2)^2`, `u = 2 (s - c) / w`.
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub kind: BumpKind,
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn cos2(center: f64, width: f64, amplitude: f64) -> Self {
        Self { kind: BumpKind::CosSquared, center, width, amplitude }
    }

    pub fn poly(center: f64, width: f64, amplitude: f64) -> Self {
        Self { kind: BumpKind::Polynomial, center, width, amplitude }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - 0.5 * self.width, self.center + 0.5 * self.width)
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        Self { amplitude, ..*self }
    }

    #[inline]
    fn local(&self, s: f64) -> Option<f64> {
        let x = s - self.center;
        (x.abs() < 0.5 * self.width).then_some(x)
    }

    pub fn value(&self, s: f64) -> f64 {
        let Some(x) = self.local(s) else { return 0.0 };
        match self.kind {
            BumpKind::CosSquared => self.amplitude * sq(math::cos(PI * x / self.width)),
            BumpKind::Polynomial => self.amplitude * sq(1.0 - sq(2.0 * x / self.width)),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let Some(x) = self.local(s) else { return 0.0 };
        let w = self.width;
        match self.kind {
            BumpKind::CosSquared => -self.amplitude * (PI / w) * math::sin(2.0 * PI * x / w),
            BumpKind::Polynomial => {
                let u = 2.0 * x / w;
                -8.0 * self.amplitude * u * (1.0 - u * u) / w
            }
        }
    }

    /// `int_{-inf}^s`
    pub fn integral(&self, s: f64) -> f64 {
        let (lo, hi) = self.support();
        if s <= lo {
            return 0.0;
        }
        let (w, a) = (self.width, self.amplitude);
        let x = s.min(hi) - self.center;
        match self.kind {
            BumpKind::CosSquared => {
                if s >= hi {
                    a * w / 2.0
                } else {
                    a * (x / 2.0 + w * math::sin(2.0 * PI * x / w) / (4.0 * PI) + w / 4.0)
                }
            }
            BumpKind::Polynomial => {
                let u = 2.0 * x / w;
                a * (w / 2.0) * (u - 2.0 * u * u * u / 3.0 + u.powi(5) / 5.0 + 8.0 / 15.0)
            }
        }
    }

    /// `sup |f|` in closed form.
    pub fn sup(&self) -> f64 {
        self.amplitude.abs()
    }

    /// `sup |f'|` in closed form.
    pub fn sup_derivative(&self) -> f64 {
        match self.kind {
            BumpKind::CosSquared => self.amplitude.abs() * PI / self.width,
            BumpKind::Polynomial => self.amplitude.abs() * 16.0 / (3.0 * math::sqrt(3.0) * self.width),
        }
    }
}

/// Sum of bumps.
pub(crate) fn eval(bumps: &[Bump], s: f64) -> f64 {
    bumps.iter().map(|b| b.value(s)).sum()
}

pub(crate) fn eval_derivative(bumps: &[Bump], s: f64) -> f64 {
    bumps.iter().map(|b| b.derivative(s)).sum()
}

pub(crate) fn eval_integral(bumps: &[Bump], s: f64) -> f64 {
    bumps.iter().map(|b| b.integral(s)).sum()
}
