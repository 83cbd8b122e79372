use crate::error::Result;
use crate::fem1d::BandedOperator;
use crate::fracops::{InnerProduct, PiecewiseTrajectory};

/// A fully discrete solution: the coefficient trajectory together with
/// `u_{0X}` and the fractional integrals `I^alpha U`, `I^{alpha+1} U` at
/// the breakpoints computed during the solve.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub(crate) alpha: f64,
    pub(crate) trajectory: PiecewiseTrajectory,
    pub(crate) initial: Vec<f64>,
    pub(crate) frac: Vec<Vec<f64>>,
    pub(crate) frac1: Vec<Vec<f64>>,
}

impl DiscreteSolution {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn trajectory(&self) -> &PiecewiseTrajectory {
        &self.trajectory
    }

    pub fn times(&self) -> &[f64] {
        self.trajectory.breakpoints()
    }

    pub fn steps(&self) -> usize {
        self.trajectory.num_intervals()
    }

    pub fn dofs(&self) -> usize {
        self.trajectory.dim()
    }

    /// `u_{0X} = U^0_-`.
    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// `U^n_-` for `0 <= n <= N`.
    pub fn end_value(&self, n: usize) -> Vec<f64> {
        if n == 0 {
            self.initial.clone()
        } else {
            self.trajectory.left_limit(n)
        }
    }

    /// `U^n_+` for `0 <= n < N`.
    pub fn start_value(&self, n: usize) -> Vec<f64> {
        self.trajectory.right_limit(n)
    }

    /// `[U]^n = U^n_+ - U^n_-` for `0 <= n < N`.
    pub fn jump(&self, n: usize) -> Vec<f64> {
        let p = self.start_value(n);
        let m = self.end_value(n);
        p.iter().zip(&m).map(|(a, b)| a - b).collect()
    }

    /// `(I^alpha U)(t_n)`.
    pub fn frac_integral(&self, n: usize) -> &[f64] {
        &self.frac[n]
    }

    /// `(I^{alpha+1} U)(t_n)`; only recorded by the DG stepper.
    pub fn frac_integral_shifted(&self, n: usize) -> Option<&[f64]> {
        self.frac1.get(n).map(Vec::as_slice)
    }

    /// `U(t)` (left limit at breakpoints).
    pub fn value_at(&self, t: f64) -> Result<Vec<f64>> {
        if t == self.trajectory.breakpoints()[0] {
            return Ok(self.initial.clone());
        }
        self.trajectory.eval(t)
    }
}

/// Norms of the jumps `[U]^j`, `j = 0..N-1`, and of the end values
/// `U^n_-`, `n = 0..=N`, in the inner product of `mass`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct JumpAccounting {
    pub jumps: Vec<f64>,
    pub end_values: Vec<f64>,
}

pub fn jump_and_boundary_accounting(u: &DiscreteSolution, mass: &BandedOperator) -> JumpAccounting {
    let norm = |v: &[f64]| mass.inner(v, v).max(0.0).sqrt();
    let jumps = (0..u.steps()).map(|j| norm(&u.jump(j))).collect();
    let end_values = (0..=u.steps()).map(|n| norm(&u.end_value(n))).collect();
    JumpAccounting { jumps, end_values }
}
