//! Continuous piecewise-linear finite elements on an interval with
//! homogeneous Dirichlet conditions.

mod assembly;
mod banded;
mod coefficients;
mod mesh;
mod norms;
mod projection;

pub use assembly::{assemble_convection, assemble_mass, assemble_stiffness, gradient_load_vector, load_vector};
pub use banded::{BandLu, BandMatrix, BandedOperator, TridiagCholesky};
pub use coefficients::{CoefficientField, SpaceFn, SpaceTimeFn};
pub use mesh::{FeSpace, Mesh1D};
pub use norms::{error_norms, max_rayleigh_ratio, norms, poincare_constant, Norms};
pub use projection::{l2_project, ritz_project};
