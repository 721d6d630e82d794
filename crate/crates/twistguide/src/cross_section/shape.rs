use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{self, sq};

/// Bounded open cross-section in the `(t2, t3)` plane.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Rectangle { width: f64, height: f64, center: [f64; 2] },
    Disk { radius: f64, center: [f64; 2] },
    Ellipse { semi_axes: [f64; 2], center: [f64; 2] },
    /// Simple polygon, either orientation.
    Polygon { vertices: Vec<[f64; 2]> },
}

impl Shape {
    pub fn rectangle(width: f64, height: f64) -> Self {
        Shape::Rectangle { width, height, center: [0.0, 0.0] }
    }

    pub fn disk(radius: f64) -> Self {
        Shape::Disk { radius, center: [0.0, 0.0] }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::DegenerateDiscretization(format!("cross-section {what}")));
        match self {
            Shape::Rectangle { width, height, .. } if !(*width > 0.0 && *height > 0.0) => bad("rectangle needs positive sides"),
            Shape::Disk { radius, .. } if !(*radius > 0.0) => bad("disk needs a positive radius"),
            Shape::Ellipse { semi_axes, .. } if !(semi_axes[0] > 0.0 && semi_axes[1] > 0.0) => bad("ellipse needs positive semi-axes"),
            Shape::Polygon { vertices } if vertices.len() < 3 || self.area() <= 0.0 => bad("polygon needs three vertices and positive area"),
            _ => Ok(()),
        }
    }

    /// `[t2_min, t3_min, t2_max, t3_max]`
    pub fn bbox(&self) -> [f64; 4] {
        match self {
            Shape::Rectangle { width, height, center: c } => [c[0] - width / 2.0, c[1] - height / 2.0, c[0] + width / 2.0, c[1] + height / 2.0],
            Shape::Disk { radius: r, center: c } => [c[0] - r, c[1] - r, c[0] + r, c[1] + r],
            Shape::Ellipse { semi_axes: s, center: c } => [c[0] - s[0], c[1] - s[1], c[0] + s[0], c[1] + s[1]],
            Shape::Polygon { vertices } => vertices.iter().fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |b, v| {
                [b[0].min(v[0]), b[1].min(v[1]), b[2].max(v[0]), b[3].max(v[1])]
            }),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Shape::Rectangle { width, height, .. } => width * height,
            Shape::Disk { radius, .. } => PI * radius * radius,
            Shape::Ellipse { semi_axes, .. } => PI * semi_axes[0] * semi_axes[1],
            Shape::Polygon { vertices } => signed_area(vertices).abs(),
        }
    }

    /// `a = sup |t|` over the closure.
    pub fn radius_about_origin(&self) -> f64 {
        match self {
            Shape::Rectangle { .. } => {
                let b = self.bbox();
                math::hypot(b[0].abs().max(b[2].abs()), b[1].abs().max(b[3].abs()))
            }
            Shape::Disk { radius, center } => math::hypot(center[0], center[1]) + radius,
            Shape::Ellipse { semi_axes: s, center: c } => {
                let f = |phi: f64| math::hypot(c[0] + s[0] * math::cos(phi), c[1] + s[1] * math::sin(phi));
                let n = 2048;
                let h = 2.0 * PI / n as f64;
                let k = (0..n).max_by(|&i, &j| f(i as f64 * h).partial_cmp(&f(j as f64 * h)).unwrap()).unwrap();
                let (mut lo, mut hi) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
                let g = (math::sqrt(5.0) - 1.0) / 2.0;
                for _ in 0..80 {
                    let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
                    if f(x1) > f(x2) {
                        hi = x2;
                    } else {
                        lo = x1;
                    }
                }
                f(0.5 * (lo + hi)).max(f(k as f64 * h))
            }
            Shape::Polygon { vertices } => vertices.iter().map(|v| math::hypot(v[0], v[1])).fold(0.0, f64::max),
        }
    }

    fn scale(&self) -> f64 {
        let b = self.bbox();
        (b[2] - b[0]).max(b[3] - b[1])
    }

    /// Strict interior test; points within `1e-12 * diam` of the boundary count as outside.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let eps = 1e-12 * self.scale();
        match self {
            Shape::Rectangle { width, height, center: c } => (p[0] - c[0]).abs() < width / 2.0 - eps && (p[1] - c[1]).abs() < height / 2.0 - eps,
            Shape::Disk { radius, center: c } => math::hypot(p[0] - c[0], p[1] - c[1]) < radius - eps,
            Shape::Ellipse { semi_axes: s, center: c } => sq((p[0] - c[0]) / s[0]) + sq((p[1] - c[1]) / s[1]) < 1.0 - 2.0 * eps / s[0].min(s[1]),
            Shape::Polygon { vertices } => winding_inside(vertices, p) && polygon_distance(vertices, p) > eps,
        }
    }

    /// Distance from the interior point `p` to the first boundary crossing along
    /// the unit axis direction `dir`, if it occurs within `max_len`.
    pub fn crossing(&self, p: [f64; 2], dir: [f64; 2], max_len: f64) -> Option<f64> {
        let t = match self {
            Shape::Rectangle { width, height, center: c } => {
                let mut t = f64::INFINITY;
                for k in 0..2 {
                    let half = if k == 0 { width / 2.0 } else { height / 2.0 };
                    if dir[k] > 0.0 {
                        t = t.min((c[k] + half - p[k]) / dir[k]);
                    } else if dir[k] < 0.0 {
                        t = t.min((c[k] - half - p[k]) / dir[k]);
                    }
                }
                t
            }
            Shape::Disk { radius, center } => quadric_exit(p, dir, *center, [*radius, *radius]),
            Shape::Ellipse { semi_axes, center } => quadric_exit(p, dir, *center, *semi_axes),
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let mut t = f64::INFINITY;
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    let e = [b[0] - a[0], b[1] - a[1]];
                    let den = dir[0] * e[1] - dir[1] * e[0];
                    if den.abs() < 1e-300 {
                        continue;
                    }
                    let w = [a[0] - p[0], a[1] - p[1]];
                    let s = (w[0] * e[1] - w[1] * e[0]) / den;
                    let u = (w[0] * dir[1] - w[1] * dir[0]) / den;
                    if s > 0.0 && (-1e-14..=1.0 + 1e-14).contains(&u) {
                        t = t.min(s);
                    }
                }
                t
            }
        };
        (t > 0.0 && t <= max_len * (1.0 + 1e-12)).then_some(t.min(max_len))
    }

    /// Outward unit normal at (or next to) the boundary point `q`.
    pub fn outward_normal(&self, q: [f64; 2]) -> [f64; 2] {
        match self {
            Shape::Rectangle { width, height, center: c } => {
                let dx = (q[0] - c[0]).abs() - width / 2.0;
                let dy = (q[1] - c[1]).abs() - height / 2.0;
                if dx.abs() <= dy.abs() {
                    [if q[0] >= c[0] { 1.0 } else { -1.0 }, 0.0]
                } else {
                    [0.0, if q[1] >= c[1] { 1.0 } else { -1.0 }]
                }
            }
            Shape::Disk { center: c, .. } => unit([q[0] - c[0], q[1] - c[1]]),
            Shape::Ellipse { semi_axes: s, center: c } => unit([(q[0] - c[0]) / sq(s[0]), (q[1] - c[1]) / sq(s[1])]),
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let orient = signed_area(vertices).signum();
                let mut best = (f64::INFINITY, [0.0, 0.0]);
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    let d = segment_distance(a, b, q);
                    if d < best.0 {
                        let e = [b[0] - a[0], b[1] - a[1]];
                        best = (d, unit([orient * e[1], -orient * e[0]]));
                    }
                }
                best.1
            }
        }
    }

    /// Closed boundary polyline (last point not repeated), counter-clockwise.
    pub fn boundary_polyline(&self, segments: usize) -> Vec<[f64; 2]> {
        let n = segments.max(8);
        match self {
            Shape::Rectangle { .. } => {
                let b = self.bbox();
                let corners = [[b[0], b[1]], [b[2], b[1]], [b[2], b[3]], [b[0], b[3]]];
                let per = (n / 4).max(1);
                let mut out = Vec::with_capacity(4 * per);
                for k in 0..4 {
                    let (p, q) = (corners[k], corners[(k + 1) % 4]);
                    for i in 0..per {
                        let s = i as f64 / per as f64;
                        out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
                    }
                }
                out
            }
            Shape::Disk { radius, center } => ellipse_points(*center, [*radius, *radius], n),
            Shape::Ellipse { semi_axes, center } => ellipse_points(*center, *semi_axes, n),
            Shape::Polygon { vertices } => {
                let mut v = vertices.clone();
                if signed_area(&v) < 0.0 {
                    v.reverse();
                }
                v
            }
        }
    }
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = math::hypot(v[0], v[1]);
    [v[0] / n, v[1] / n]
}

fn ellipse_points(c: [f64; 2], s: [f64; 2], n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / n as f64;
            [c[0] + s[0] * math::cos(phi), c[1] + s[1] * math::sin(phi)]
        })
        .collect()
}

fn quadric_exit(p: [f64; 2], d: [f64; 2], c: [f64; 2], s: [f64; 2]) -> f64 {
    let (x, y) = ((p[0] - c[0]) / s[0], (p[1] - c[1]) / s[1]);
    let (u, v) = (d[0] / s[0], d[1] / s[1]);
    let a = u * u + v * v;
    let b = x * u + y * v;
    let cc = x * x + y * y - 1.0;
    let disc = (b * b - a * cc).max(0.0);
    // larger root, written to avoid cancellation when cc ~ 0
    if b >= 0.0 {
        -cc / (b + math::sqrt(disc))
    } else {
        (-b + math::sqrt(disc)) / a
    }
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1]).sum::<f64>() / 2.0
}

fn winding_inside(v: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn segment_distance(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let e = [b[0] - a[0], b[1] - a[1]];
    let l2 = e[0] * e[0] + e[1] * e[1];
    let s = (((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / l2).clamp(0.0, 1.0);
    math::hypot(a[0] + s * e[0] - p[0], a[1] + s * e[1] - p[1])
}

fn polygon_distance(v: &[[f64; 2]], p: [f64; 2]) -> f64 {
    let n = v.len();
    (0..n).map(|i| segment_distance(v[i], v[(i + 1) % n], p)).fold(f64::INFINITY, f64::min)
}
