//! The discrete energy identity of the DG scheme, term by term.
//!
//! The memory term `int_0^{t_n} <d_t^{1-alpha} A U, U>` is computed twice:
//!
//! * from the fractional integrals recorded by the solver, exactly as the
//!   scheme sees it (`P_0` and `P_1` test moments on each interval);
//! * independently, by writing `d_s I^alpha U` as the kernel response to the
//!   initial value and the jumps plus `I^alpha U'`, and integrating against
//!   `U` with exact reflected kernel moments and [`history_cross_integral`].

use super::psi::psi;
use super::source_norms;
use crate::error::{config, Result};
use crate::fem1d::{assemble_mass, assemble_stiffness, poincare_constant};
use crate::fracops::{history_cross_integral, FracKernel, InnerProduct};
use crate::timestep::{DiscreteSolution, SchemeConfig};

/// One row per breakpoint `t_n`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EnergyRow {
    pub n: usize,
    pub t: f64,
    /// `||U^n_-||^2`
    pub end_sq: f64,
    /// `sum_{j=1}^{n-1} ||[U]^j||^2`
    pub jumps_sq: f64,
    pub memory: f64,
    /// `||u_{0X}||^2 + C_Omega Psi / (kappa_min t_n^{1-alpha}) int_0^{t_n} ||g||^2`
    pub rhs: f64,
    pub slack: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EnergyLedger {
    pub alpha: f64,
    pub degree: usize,
    pub steps: usize,
    pub initial_sq: f64,
    pub rows: Vec<EnergyRow>,
    /// Memory term at `t_N` by the independent route.
    pub memory_check: f64,
    /// `|memory - memory_check| / scale` at `t_N`.
    pub memory_mismatch: f64,
    /// `min_n slack_n / scale_n`.
    pub worst_relative_slack: f64,
    /// `min_n memory_n / scale_n`.
    pub worst_relative_memory: f64,
    pub passed: bool,
}

pub const ENERGY_TOL: f64 = 1e-8;
pub const MEMORY_TOL: f64 = 1e-9;

/// Evaluates every term of the DG energy inequality at every `t_n`.
pub fn energy_check(u: &DiscreteSolution, cfg: &SchemeConfig) -> Result<EnergyLedger> {
    if cfg.coeffs.has_forcing() {
        return config("the energy inequality applies to F = 0 only");
    }
    let Some(_) = u.frac_integral_shifted(0) else {
        return config("energy_check needs a DG solution");
    };
    let space = &cfg.space;
    let mass = assemble_mass(space);
    let stiff = assemble_stiffness(space, &cfg.coeffs)?;
    let mesh = space.mesh();
    let c_omega = poincare_constant(mesh.x_left(), mesh.x_right())?;
    let psi_a = psi(u.alpha())?;
    let kappa_min = cfg.coeffs.kappa_min();
    let times = u.times().to_vec();
    let nsteps = u.steps();
    let m = u.dofs();
    let traj = u.trajectory();

    let g_sq = source_norms(space, &cfg.coeffs, &times).cumulative_sq;
    let initial_sq = mass.inner(u.initial(), u.initial());

    let mut rows = Vec::with_capacity(nsteps);
    let mut memory = 0.0;
    let mut jumps_sq = 0.0;
    let mut tmp = vec![0.0; m];
    for n in 1..=nsteps {
        let (a, b) = (times[n - 1], times[n]);
        let k = b - a;
        let (jp, jn) = (u.frac_integral(n - 1), u.frac_integral(n));
        for i in 0..m {
            tmp[i] = jn[i] - jp[i];
        }
        memory += stiff.inner(traj.coefficient(n - 1, 0), &tmp);
        if traj.degree(n - 1) == 1 {
            let (kp, kn) = (u.frac_integral_shifted(n - 1).unwrap(), u.frac_integral_shifted(n).unwrap());
            for i in 0..m {
                tmp[i] = jn[i] + jp[i] - 2.0 / k * (kn[i] - kp[i]);
            }
            memory += stiff.inner(traj.coefficient(n - 1, 1), &tmp);
        }
        if n >= 2 {
            let jmp = u.jump(n - 1);
            jumps_sq += mass.inner(&jmp, &jmp);
        }
        let end = u.end_value(n);
        let end_sq = mass.inner(&end, &end);
        let rhs = initial_sq + c_omega * psi_a / (kappa_min * b.powf(1.0 - u.alpha())) * g_sq[n];
        let lhs = end_sq + jumps_sq + memory;
        let scale = rhs.max(end_sq + jumps_sq + memory.abs()).max(f64::MIN_POSITIVE);
        rows.push(EnergyRow { n, t: b, end_sq, jumps_sq, memory, rhs, slack: rhs - lhs, scale });
    }

    let memory_check = memory_by_jumps(u, &stiff)?;
    let last = rows.last().unwrap();
    let memory_mismatch = (last.memory - memory_check).abs() / last.scale;
    let worst_relative_slack = rows.iter().map(|r| r.slack / r.scale).fold(f64::INFINITY, f64::min);
    let worst_relative_memory = rows.iter().map(|r| r.memory / r.scale).fold(f64::INFINITY, f64::min);
    let passed =
        worst_relative_slack >= -ENERGY_TOL && worst_relative_memory >= -MEMORY_TOL && memory_mismatch <= MEMORY_TOL;
    Ok(EnergyLedger {
        alpha: u.alpha(),
        degree: cfg.degree,
        steps: nsteps,
        initial_sq,
        rows,
        memory_check,
        memory_mismatch,
        worst_relative_slack,
        worst_relative_memory,
        passed,
    })
}

/// `int_0^{t_N} <d_s I^alpha U, A U> ds` with
/// `d_s I^alpha U(s) = sum_{t_j < s} omega_alpha(s - t_j) J_j + (I^alpha U')(s)`,
/// `J_0 = U^0_+`, `J_j = [U]^j`.
pub fn memory_by_jumps(u: &DiscreteSolution, stiff: &dyn InnerProduct) -> Result<f64> {
    let traj = u.trajectory();
    let times = u.times();
    let nsteps = u.steps();
    let m = u.dofs();
    let ker = FracKernel::new(u.alpha())?;
    let mut total = 0.0;
    let mut w = [0.0; 4];
    let mut acc = vec![0.0; m];
    for j in 0..nsteps {
        let jump = if j == 0 { u.start_value(0) } else { traj.jump(j) };
        acc.iter_mut().for_each(|v| *v = 0.0);
        for l in j..nsteps {
            let p = traj.degree(l);
            ker.reflected_weights(times[l], times[l + 1], times[j], p, &mut w);
            for (q, wq) in w.iter().enumerate().take(p + 1) {
                for (o, c) in acc.iter_mut().zip(traj.coefficient(l, q)) {
                    *o += wq * c;
                }
            }
        }
        total += stiff.inner(&acc, &jump);
    }
    let deriv = traj.derivative();
    total += history_cross_integral(traj, &deriv, u.alpha(), traj.final_time(), stiff)?;
    Ok(total)
}
