//! First-order product integration for the time-integrated Galerkin form
//!
//! `<U(t), chi> + <kappa I^alpha U'(t), chi'> - <(B_1 U)(t), chi'> = <f_X(t), chi>`,
//! `f_X(t) = u_{0X} + int_0^t g`,
//!
//! with `U` piecewise constant and `F` frozen at interval midpoints, so that
//! `B_1 U(t_n) = sum_{l <= n} F(t_{l-1/2}) (J(t_l) - J(t_{l-1}))`, `J = I^alpha U`.
//! With `w = omega_{alpha+1}(k_n)` and `H` the history part of `J(t_n)` each
//! step solves
//!
//! `(M + w A - w C_n) U^n = M u_{0X} + G(t_n) - A H + S_{n-1} + C_n (H - J(t_{n-1}))`,
//!
//! where `C_l` is the convection matrix at the midpoint of `I_l` and
//! `S_{n-1} = sum_{l < n} C_l (J(t_l) - J(t_{l-1}))`.

use super::config::SchemeConfig;
use super::dg::{add_history, source_moments};
use super::solution::DiscreteSolution;
use crate::error::{Error, Result};
use crate::fem1d::{assemble_convection, assemble_mass, assemble_stiffness, BandedOperator};
use crate::fracops::{FracKernel, PiecewiseTrajectory};

pub fn solve_general_f(cfg: &SchemeConfig) -> Result<DiscreteSolution> {
    cfg.validate()?;
    if cfg.degree != 0 {
        return Err(Error::Config(format!("the forced scheme is piecewise constant in time, got degree {}", cfg.degree)));
    }
    let space = &cfg.space;
    let m = space.dofs();
    let mass = assemble_mass(space);
    let stiff = assemble_stiffness(space, &cfg.coeffs)?;
    let u0x = cfg.initial_vector()?;
    let times = cfg.partition.points();
    let nsteps = cfg.partition.steps();
    let ka = FracKernel::new(cfg.alpha)?;

    let base = mass.apply(&u0x);
    let mut g_acc = vec![0.0; m];
    let mut s_acc = vec![0.0; m];
    let mut coeffs = vec![0.0; nsteps * m];
    let mut frac = vec![vec![0.0; m]];
    let mut hist = vec![0.0; m];

    for n in 1..=nsteps {
        let (a, b) = (times[n - 1], times[n]);
        let g = source_moments(space, &cfg.coeffs, a, b, 0);
        for (acc, v) in g_acc.iter_mut().zip(&g[0]) {
            *acc += v;
        }
        hist.iter_mut().for_each(|v| *v = 0.0);
        add_history(&ka, &times, &coeffs, 0, m, n - 1, b, &mut hist);
        let mut w = [0.0; 4];
        ka.interval_weights(a, b, b, 0, &mut w);
        let w = w[0];
        let conv = if cfg.coeffs.has_forcing() {
            Some(assemble_convection(space, &cfg.coeffs, 0.5 * (a + b)))
        } else {
            None
        };

        let mut rhs: Vec<f64> = (0..m).map(|i| base[i] + g_acc[i] + s_acc[i]).collect();
        stiff.apply_add(-1.0, &hist, &mut rhs);
        let jp = &frac[n - 1];
        let delta_hist: Vec<f64> = hist.iter().zip(jp).map(|(h, j)| h - j).collect();
        let mut op = BandedOperator::combine(1.0, &mass, w, &stiff);
        if let Some(c) = &conv {
            c.apply_add(1.0, &delta_hist, &mut rhs);
            op = BandedOperator::combine(1.0, &op, -w, c);
        }
        let lu = op.to_band(1, 1).factor(n).map_err(|e| match e {
            Error::Singular { step, detail } => Error::Singular {
                step,
                detail: format!(
                    "{detail}; |M + wA| = {:e}, |w C| = {:e}",
                    BandedOperator::combine(1.0, &mass, w, &stiff).max_abs(),
                    conv.as_ref().map_or(0.0, |c| w * c.max_abs())
                ),
            },
            other => other,
        })?;
        lu.solve_in_place(&mut rhs);
        coeffs[(n - 1) * m..n * m].copy_from_slice(&rhs);

        let jn: Vec<f64> = hist.iter().zip(&rhs).map(|(h, u)| h + w * u).collect();
        if let Some(c) = &conv {
            let dj: Vec<f64> = jn.iter().zip(jp).map(|(x, y)| x - y).collect();
            c.apply_add(1.0, &dj, &mut s_acc);
        }
        frac.push(jn);
    }

    let trajectory = PiecewiseTrajectory::new(times, vec![0; nsteps], coeffs, m)?;
    Ok(DiscreteSolution { alpha: cfg.alpha, trajectory, initial: u0x, frac, frac1: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::{assemble_convection, CoefficientField, FeSpace};
    use crate::fracops::{frac_integral_eval, operator_b1};
    use crate::timestep::{dg_solve_diffusion, InitialDatum, TimePartition};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn cfg(alpha: f64, forcing: bool, source: bool) -> SchemeConfig {
        let mut coeffs = CoefficientField::constant_kappa(1.0).unwrap();
        if forcing {
            coeffs = coeffs.with_forcing(Arc::new(|x, _| 1.0 + x), Arc::new(|_, _| 0.0), 2.0, 0.0);
        }
        if source {
            coeffs = coeffs.with_source(Arc::new(|x, t| t * (PI * x).sin()));
        }
        SchemeConfig::new(
            alpha,
            TimePartition::new(1.0, 16, 2.0).unwrap(),
            0,
            FeSpace::uniform(0.0, 1.0, 11).unwrap(),
            coeffs,
            InitialDatum::new(Arc::new(|x| (PI * x).sin() + 0.3 * (2.0 * PI * x).sin()), None),
        )
        .unwrap()
    }

    #[test]
    fn matches_dg0_without_forcing() {
        for alpha in [0.3, 0.8, 1.0] {
            let c = cfg(alpha, false, true);
            let a = solve_general_f(&c).unwrap();
            let b = dg_solve_diffusion(&c).unwrap();
            for (x, y) in a.trajectory().coefficients().iter().zip(b.trajectory().coefficients()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn satisfies_collocation_equation_with_frozen_forcing() {
        // constant-in-time F: freezing is exact, so the equation can be checked
        // with operator_b1 evaluated componentwise on the nodal trajectory
        let c = cfg(0.6, true, true);
        let u = solve_general_f(&c).unwrap();
        let space = &c.space;
        let m = space.dofs();
        let mass = crate::fem1d::assemble_mass(space);
        let stiff = crate::fem1d::assemble_stiffness(space, &c.coeffs).unwrap();
        let conv = assemble_convection(space, &c.coeffs, 0.0);
        let n = 9;
        let t = u.times()[n];
        let ones = |_: f64, o: &mut [f64]| o.iter_mut().for_each(|v| *v = 1.0);
        let zeros = |_: f64, o: &mut [f64]| o.iter_mut().for_each(|v| *v = 0.0);
        // for x-dependent, t-independent F, C B1 U = C (J(t) - J(0)) where B1 uses unit field
        let b1 = operator_b1(u.trajectory(), &ones, &zeros, 0.6, t).unwrap();
        let j = frac_integral_eval(u.trajectory(), 0.6, t).unwrap();
        let un = u.end_value(n);
        let mut lhs = mass.apply(&un);
        stiff.apply_add(1.0, &j, &mut lhs);
        conv.apply_add(-1.0, &b1, &mut lhs);
        let mut rhs = mass.apply(u.initial());
        let rule = crate::quadrature::GaussRule::new(4);
        for k in 1..=n {
            let (a, b) = (u.times()[k - 1], u.times()[k]);
            for (s, w) in rule.mapped(a, b) {
                let l = crate::fem1d::load_vector(space, |x| s * (PI * x).sin());
                for i in 0..m {
                    rhs[i] += w * l[i];
                }
            }
        }
        for i in 0..m {
            assert!((lhs[i] - rhs[i]).abs() < 1e-12, "{i}: {} vs {}", lhs[i], rhs[i]);
        }
    }
}
