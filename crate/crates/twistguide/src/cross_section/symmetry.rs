use alloc::vec::Vec;

use super::Shape;
use crate::math;

/// Result of rasterizing `omega` against its rotations about the origin.
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub angles: Vec<f64>,
    /// Area of `omega` symmetric-difference `R_alpha omega`, per angle.
    pub differences: Vec<f64>,
    pub tolerance: f64,
    /// First angle whose difference exceeds the tolerance.
    pub witness: Option<f64>,
}

impl SymmetryReport {
    /// True when some tested rotation moves `omega` (the non-symmetry hypothesis).
    pub fn satisfies_non_symmetry(&self) -> bool {
        self.witness.is_some()
    }
}

/// Rasterizes on a `resolution^2` cell-centred grid over `[-a, a]^2`, slightly
/// offset so that no sample lands exactly on an axis-aligned boundary.
pub fn rotational_symmetry_check(shape: &Shape, angles: &[f64], resolution: usize) -> SymmetryReport {
    let a = shape.radius_about_origin() * (1.0 + 1e-9);
    let n = resolution.max(16);
    let h = 2.0 * a / n as f64;
    let off = 0.381_966_011 * h;
    let tolerance = 1e-3 * shape.area();
    let mut differences = Vec::with_capacity(angles.len());
    let mut witness = None;
    for &alpha in angles {
        let (c, s) = (math::cos(alpha), math::sin(alpha));
        let mut count = 0usize;
        for i in 0..n {
            let x = -a + (i as f64 + 0.5) * h + off;
            for j in 0..n {
                let y = -a + (j as f64 + 0.5) * h + off;
                // p lies in R_alpha omega iff R_{-alpha} p lies in omega
                let back = [c * x + s * y, -s * x + c * y];
                if shape.contains([x, y]) != shape.contains(back) {
                    count += 1;
                }
            }
        }
        let d = count as f64 * h * h;
        if witness.is_none() && d > tolerance {
            witness = Some(alpha);
        }
        differences.push(d);
    }
    SymmetryReport { angles: angles.to_vec(), differences, tolerance, witness }
}
