//! Fractional-calculus operations on piecewise-polynomial trajectories.

mod gamma;
mod kernel;
mod mittag_leffler;
mod ops;
mod trajectory;

pub use gamma::{gamma, ln_gamma, rgamma};
pub use kernel::{frac_integral_eval, omega, FracKernel};
pub use mittag_leffler::{gronwall_bound, mittag_leffler, Z_MAX as ML_Z_MAX, Z_MIN as ML_Z_MIN};
pub use ops::{
    history_cross_integral, history_inner_integral, operator_b1, rl_derivative_eval, Euclidean,
    InnerProduct,
};
pub use trajectory::{legendre_endpoint_derivative, legendre_values, PiecewiseTrajectory, MAX_DEGREE};

pub(crate) use kernel::omega_pos;
