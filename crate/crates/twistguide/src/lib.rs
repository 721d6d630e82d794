//! Discrete spectral lab for twisted and bent tubes in three dimensions.
//!
//! The crate discretizes a Dirichlet waveguide `Omega = L(R x omega)` built from a
//! planar cross-section `omega` swept along a curve with curvatures `kappa1`,
//! `kappa2` and a rotation angle `theta`. It computes the transverse quantities
//! (`E1`, the twisting constant `lambda`), assembles the straightened quadratic
//! forms on a truncated tube and evaluates the explicit Hardy and stability
//! constants next to their numerical counterparts.
//!
//! Everything here is `no_std` + `alloc`; file formats and the command line live
//! in the companion `twistguide-lab` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cross_section;
pub mod curve_geometry;
pub mod error;
pub mod hardy_constants;
pub mod linalg;
pub(crate) mod math;
pub mod stability_thresholds;
pub mod waveguide_operators;

pub use error::{Error, Result};
