//! Measurable counterparts of the stability, energy and error estimates.

mod convergence;
mod energy;
mod lemmas;
mod probe;
mod psi;
mod sweeps;

pub use convergence::{
    convergence_study, fit_slope, modal_error, ConvergenceSetup, RateRow, RateTable, SLOPE_SHIFT_TOL,
};
pub use energy::{energy_check, memory_by_jumps, EnergyLedger, EnergyRow, ENERGY_TOL, MEMORY_TOL};
pub use lemmas::{
    commutator_residual, g_alternative_sides, i_mu_y_sides, i_nu_i_mu_sides, lemma_property_suite, phi_t_sides,
    positivity_sides, random_continuous, random_trajectory, LemmaCheck, LemmaReport, COMMUTATOR_TOL, LEMMA_TOL,
};
pub use probe::{b_operator_ratio_probe, refinement_family, ProbeReport, ProbeRow, PROBE_GROWTH};
pub use psi::psi;
pub use sweeps::{
    gradient_sweep, stability_sweep, DataCase, StabilityReport, SweepKind, SweepRecord, SPREAD_LIMIT,
};

use crate::fem1d::{CoefficientField, FeSpace};
use crate::quadrature::GaussRule;

/// Cumulative time integrals of the source, indexed by breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceNorms {
    /// `int_0^{t_n} ||g||`
    pub cumulative_l1: Vec<f64>,
    /// `int_0^{t_n} ||g||^2`
    pub cumulative_sq: Vec<f64>,
    /// `int_0^{t_n} ||s g(s)||^2`
    pub cumulative_weighted_sq: Vec<f64>,
}

impl SourceNorms {
    /// `||u0|| + int_0^t ||g|| + (t^{-1} int_0^t ||s g||^2)^{1/2}` at `t = t_n`.
    pub fn functional(&self, initial_norm: f64, n: usize, t: f64) -> f64 {
        let w = if t > 0.0 { (self.cumulative_weighted_sq[n] / t).sqrt() } else { 0.0 };
        initial_norm + self.cumulative_l1[n] + w
    }
}

/// Exact `L2(Omega)` norms of `g(., t)` (5-point Gauss per element),
/// integrated in time by 4-point Gauss on each interval of `times`.
pub fn source_norms(space: &FeSpace, coeffs: &CoefficientField, times: &[f64]) -> SourceNorms {
    let n = times.len();
    let mut out = SourceNorms {
        cumulative_l1: vec![0.0; n],
        cumulative_sq: vec![0.0; n],
        cumulative_weighted_sq: vec![0.0; n],
    };
    if !coeffs.has_source() {
        return out;
    }
    let space_rule = GaussRule::new(5);
    let time_rule = GaussRule::new(4);
    let mesh = space.mesh();
    let g_sq = |t: f64| {
        (0..mesh.num_elements())
            .map(|e| {
                let (a, b) = mesh.element(e);
                space_rule.integrate(a, b, |x| coeffs.source(x, t).powi(2))
            })
            .sum::<f64>()
    };
    for k in 1..n {
        let (mut l1, mut sq, mut wsq) = (0.0, 0.0, 0.0);
        for (t, w) in time_rule.mapped(times[k - 1], times[k]) {
            let v = g_sq(t);
            l1 += w * v.sqrt();
            sq += w * v;
            wsq += w * t * t * v;
        }
        out.cumulative_l1[k] = out.cumulative_l1[k - 1] + l1;
        out.cumulative_sq[k] = out.cumulative_sq[k - 1] + sq;
        out.cumulative_weighted_sq[k] = out.cumulative_weighted_sq[k - 1] + wsq;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn source_norms_of_t_sin() {
        // ||t sin(pi x)|| = t / sqrt(2) on (0, 1)
        let space = FeSpace::uniform(0.0, 1.0, 7).unwrap();
        let coeffs = CoefficientField::constant_kappa(1.0)
            .unwrap()
            .with_source(Arc::new(|x, t| t * (PI * x).sin()));
        let times = [0.0, 0.3, 1.0];
        let s = source_norms(&space, &coeffs, &times);
        let r2 = 0.5f64.sqrt();
        assert!((s.cumulative_l1[2] - 0.5 * r2).abs() < 1e-13);
        assert!((s.cumulative_sq[2] - 1.0 / 6.0).abs() < 1e-13);
        assert!((s.cumulative_weighted_sq[2] - 0.1).abs() < 1e-13);
        assert!((s.functional(1.0, 2, 1.0) - (1.0 + 0.5 * r2 + 0.1f64.sqrt())).abs() < 1e-13);
    }
}
