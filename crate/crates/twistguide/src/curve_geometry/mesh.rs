use alloc::vec::Vec;

use super::{CurvatureProfile, FrameField};
use crate::cross_section::Shape;

/// Triangulated lateral surface of the tube.
#[derive(Debug, Clone, Default)]
pub struct TubeMesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices.
    pub triangles: Vec<[usize; 3]>,
}

/// Sweeps the boundary of `omega` along the frame samples, taking every
/// `stride`-th sample.
pub fn tube_surface(frame: &FrameField, profile: &CurvatureProfile, shape: &Shape, boundary_segments: usize, stride: usize) -> TubeMesh {
    let ring = shape.boundary_polyline(boundary_segments);
    let m = ring.len();
    let stride = stride.max(1);
    let mut rows: Vec<usize> = (0..frame.len()).step_by(stride).collect();
    if rows.last() != Some(&(frame.len() - 1)) {
        rows.push(frame.len() - 1);
    }
    let mut mesh = TubeMesh::default();
    for &i in &rows {
        for t in &ring {
            mesh.vertices.push(frame.tube_point(profile, i, *t));
        }
    }
    for r in 0..rows.len().saturating_sub(1) {
        for k in 0..m {
            let (a, b) = (r * m + k, r * m + (k + 1) % m);
            let (c, d) = (a + m, b + m);
            mesh.triangles.push([a, b, d]);
            mesh.triangles.push([a, d, c]);
        }
    }
    mesh
}
