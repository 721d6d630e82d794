//! Cross-section discretization: grid, Dirichlet Laplacian, tangential
//! derivative, ground pair and the twisting constant `lambda`.

mod domain;
mod shape;
mod spectrum;
mod symmetry;

pub use domain::{CrossSectionDomain, Crossing, EdgeFunctional, Link, TangentialOperator, TransverseEdge, DIRS, THETA_FLOOR};
pub use shape::Shape;
pub use spectrum::{
    compute_lambda, dirichlet_ground_pair, ground_refinement, lambda_operator, lambda_refinement, lowest_eigenpairs, GroundPair,
    LambdaResult, GAP_FLOOR,
};
pub use symmetry::{rotational_symmetry_check, SymmetryReport};
