//! Reference curve: curvature profiles, RK4 frame, tube map and metric.

mod bump;
mod frame;
mod injectivity;
mod mesh;
mod metric;
mod profile;

pub use bump::{Bump, BumpKind};
pub use frame::{integrate_frame, Frame, FrameField, Vec3, DRIFT_LIMIT};
pub use injectivity::{check_injectivity, ellipticity_bounds, frame_bound_excess, scan_centerline, InjectivityReport, InjectivityVerdict};
pub use mesh::{tube_surface, TubeMesh};
pub use metric::{metric_at, MetricSample};
pub use profile::{make_profile, CurvatureProfile, ProfileNorms, ProfileSpec};
