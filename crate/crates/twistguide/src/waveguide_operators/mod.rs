//! Discrete forms on truncated tubes and their low-lying spectra.

mod dense;
mod form;
mod grid;
mod modal;

pub use form::{assemble_l_sigma, assemble_laplacian, assemble_q, FormKind, SymmetricForm, TwistSign};
pub use grid::{EndCondition, TransverseBasis, TruncatedTubeGrid, MAX_TRANSVERSE_NODES, SUPPORT_MARGIN};
pub use modal::{Arm, Closure, ModalOperator, ShiftedFactor};
mod spectrum;

pub use spectrum::{
    count_below, eigenvalues_below_threshold, lowest_weighted, truncation_study, FarField, SpectralOptions, SpectralResult,
    TruncationRow, TruncationStudy, WeightedEigen, WeightedOptions,
};
