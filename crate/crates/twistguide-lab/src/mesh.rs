use twistguide::curve_geometry::{integrate_frame, tube_surface, TubeMesh};

use crate::error::LabError;
use crate::output::num;
use crate::scenario::Scenario;

/// Boundary resolution of the swept section.
pub const RING_SEGMENTS: usize = 48;

/// Lateral surface of the truncated tube `(-L, L)` with rings about every `ds`.
///
/// The frame is integrated at the profile's sampling step; coarser steps
/// lose orthonormality on strong bends.
pub fn scenario_mesh(sc: &Scenario) -> Result<TubeMesh, LabError> {
    sc.validate()?;
    let p = sc.curvature_profile()?;
    let l = sc.half_length;
    let step = p.ds().min(sc.resolution.ds);
    let frame = integrate_frame(&p, step, (-l, l))?;
    let stride = (sc.resolution.ds / step).round().max(1.0) as usize;
    Ok(tube_surface(&frame, &p, &sc.shape(), RING_SEGMENTS, stride))
}

/// Wavefront OBJ with `v` and `f` records only; faces are one-based.
pub fn to_obj(mesh: &TubeMesh) -> String {
    let mut out = String::with_capacity(40 * (mesh.vertices.len() + mesh.triangles.len()));
    for v in &mesh.vertices {
        out.push_str(&format!("v {} {} {}\n", num(v[0]), num(v[1]), num(v[2])));
    }
    for t in &mesh.triangles {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    out
}
