//! Fully discrete solvers: DG time stepping for fractional diffusion, a
//! product-integration scheme for general forcing, and the exact modal
//! solution used as a reference.

mod config;
mod dg;
mod general;
mod modal;
mod partition;
mod solution;

pub use config::{InitialDatum, InitialProjection, SchemeConfig};
pub use dg::dg_solve_diffusion;
pub use general::solve_general_f;
pub use modal::{modal_reference, ModalSolution};
pub use partition::TimePartition;
pub use solution::{jump_and_boundary_accounting, DiscreteSolution, JumpAccounting};
