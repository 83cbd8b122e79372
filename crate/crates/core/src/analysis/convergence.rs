use crate::error::{config, Result};
use crate::fem1d::{error_norms, CoefficientField, FeSpace, Norms};
use crate::timestep::{
    dg_solve_diffusion, DiscreteSolution, InitialDatum, InitialProjection, ModalSolution, SchemeConfig, TimePartition,
};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

/// Largest accepted change of a fitted slope when the step count is halved.
pub const SLOPE_SHIFT_TOL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RateRow {
    pub dofs: usize,
    pub h: f64,
    pub error_l2: f64,
    pub error_h1: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RateTable {
    pub alpha: f64,
    /// Breakpoint nearest to the requested time, shared with the halved
    /// partition when the step count is even.
    pub time: f64,
    pub steps: usize,
    pub grading: f64,
    pub degree: usize,
    pub rows: Vec<RateRow>,
    pub slope_l2: Option<f64>,
    pub slope_h1: Option<f64>,
    /// Slopes with half the time steps.
    pub halved_slope_l2: Option<f64>,
    pub halved_slope_h1: Option<f64>,
    /// Set when halving the step count moves a slope by more than
    /// [`SLOPE_SHIFT_TOL`]: the time discretization is not negligible.
    pub temporal_dominated: bool,
}

/// Least-squares slope of `ln err` against `ln h`; `None` below two points.
pub fn fit_slope(h: &[f64], err: &[f64]) -> Option<f64> {
    if h.len() < 2 || h.len() != err.len() {
        return None;
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `L2` and `H1`-seminorm errors of `U(t)` against a modal solution.
pub fn modal_error(space: &FeSpace, u: &DiscreteSolution, exact: &ModalSolution, t: f64) -> Result<Norms> {
    let c = u.value_at(t)?;
    let (v, dv) = exact.profile(t)?;
    Ok(error_norms(space, &c, v, dv))
}

/// A constant-`kappa`, source-free problem with sine-mode initial data.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConvergenceSetup {
    pub alpha: f64,
    pub kappa: f64,
    pub x_left: f64,
    pub x_right: f64,
    /// `(m, a_m)`: `u_0 = sum a_m sin(m pi (x - x_L) / L)`.
    pub modes: Vec<(usize, f64)>,
    /// Interior node counts, strictly increasing.
    pub meshes: Vec<usize>,
    pub partition: TimePartition,
    pub degree: usize,
    pub projection: InitialProjection,
    pub time: f64,
}

fn sine_datum(x_left: f64, length: f64, modes: &[(usize, f64)]) -> InitialDatum {
    let m1 = modes.to_vec();
    let m2 = modes.to_vec();
    let k = move |m: usize| m as f64 * PI / length;
    InitialDatum::new(
        Arc::new(move |x| m1.iter().map(|&(m, a)| a * (k(m) * (x - x_left)).sin()).sum()),
        Some(Arc::new(move |x| m2.iter().map(|&(m, a)| a * k(m) * (k(m) * (x - x_left)).cos()).sum())),
    )
}

fn errors(setup: &ConvergenceSetup, partition: &TimePartition, t: f64) -> Result<Vec<RateRow>> {
    let exact = ModalSolution::new(setup.x_left, setup.x_right, setup.alpha, setup.kappa, setup.modes.clone())?;
    let u0 = sine_datum(setup.x_left, setup.x_right - setup.x_left, &setup.modes);
    setup
        .meshes
        .par_iter()
        .map(|&m| {
            let space = FeSpace::uniform(setup.x_left, setup.x_right, m)?;
            let cfg = SchemeConfig::new(
                setup.alpha,
                *partition,
                setup.degree,
                space.clone(),
                CoefficientField::constant_kappa(setup.kappa)?,
                u0.clone(),
            )?
            .with_projection(setup.projection);
            let u = dg_solve_diffusion(&cfg)?;
            let e = modal_error(&space, &u, &exact, t)?;
            Ok(RateRow { dofs: m, h: space.mesh().h(), error_l2: e.l2, error_h1: e.h1_semi })
        })
        .collect()
}

/// Spatial error table at the breakpoint nearest to `setup.time`, with a
/// second run on half the time steps to detect temporal pollution.
pub fn convergence_study(setup: &ConvergenceSetup) -> Result<RateTable> {
    if setup.meshes.is_empty() {
        return config("convergence study needs at least one mesh");
    }
    if setup.meshes.windows(2).any(|w| w[1] <= w[0]) {
        return config("mesh sizes must be strictly increasing");
    }
    if setup.modes.is_empty() {
        return config("initial datum needs at least one mode");
    }
    let times = setup.partition.points();
    // with an even step count, stay on breakpoints shared with the halved partition
    let stride = if setup.partition.steps() % 2 == 0 { 2 } else { 1 };
    let n = (stride..times.len())
        .step_by(stride)
        .min_by(|&i, &j| (times[i] - setup.time).abs().total_cmp(&(times[j] - setup.time).abs()))
        .unwrap_or(times.len() - 1);
    let t = times[n];
    let rows = errors(setup, &setup.partition, t)?;
    let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let slope_l2 = fit_slope(&h, &rows.iter().map(|r| r.error_l2).collect::<Vec<_>>());
    let slope_h1 = fit_slope(&h, &rows.iter().map(|r| r.error_h1).collect::<Vec<_>>());

    let (mut halved_slope_l2, mut halved_slope_h1, mut temporal_dominated) = (None, None, false);
    if rows.len() >= 2 && setup.partition.steps() >= 2 {
        let coarse = setup.partition.with_steps(setup.partition.steps() / 2)?;
        let half = errors(setup, &coarse, t)?;
        halved_slope_l2 = fit_slope(&h, &half.iter().map(|r| r.error_l2).collect::<Vec<_>>());
        halved_slope_h1 = fit_slope(&h, &half.iter().map(|r| r.error_h1).collect::<Vec<_>>());
        let shift = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => (a - b).abs(),
            _ => f64::INFINITY,
        };
        temporal_dominated = shift(slope_l2, halved_slope_l2) > SLOPE_SHIFT_TOL
            || shift(slope_h1, halved_slope_h1) > SLOPE_SHIFT_TOL;
    }
    Ok(RateTable {
        alpha: setup.alpha,
        time: t,
        steps: setup.partition.steps(),
        grading: setup.partition.grading(),
        degree: setup.degree,
        rows,
        slope_l2,
        slope_h1,
        halved_slope_l2,
        halved_slope_h1,
        temporal_dominated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(alpha: f64, meshes: Vec<usize>) -> ConvergenceSetup {
        ConvergenceSetup {
            alpha,
            kappa: 1.0,
            x_left: 0.0,
            x_right: 1.0,
            modes: vec![(1, 1.0)],
            meshes,
            partition: TimePartition::new(1.0, 256, TimePartition::default_grading(alpha)).unwrap(),
            degree: 1,
            projection: InitialProjection::Ritz,
            time: 0.5,
        }
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|x: &f64| 3.0 * x.powf(1.7)).collect();
        assert!((fit_slope(&h, &e).unwrap() - 1.7).abs() < 1e-12);
        assert_eq!(fit_slope(&h[..1], &e[..1]), None);
    }

    #[test]
    fn single_mesh_has_no_slope() {
        let t = convergence_study(&setup(0.5, vec![7])).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!((t.slope_l2, t.slope_h1), (None, None));
        assert!(!t.temporal_dominated);
    }

    #[test]
    fn heat_rates() {
        let t = convergence_study(&setup(1.0, vec![7, 15, 31])).unwrap();
        let (l2, h1) = (t.slope_l2.unwrap(), t.slope_h1.unwrap());
        assert!((l2 - 2.0).abs() < 0.2 && (h1 - 1.0).abs() < 0.2, "{t:?}");
        assert!(!t.temporal_dominated, "{t:?}");
    }

    #[test]
    fn rejects_bad_meshes() {
        assert!(convergence_study(&setup(0.5, vec![])).is_err());
        assert!(convergence_study(&setup(0.5, vec![15, 7])).is_err());
    }
}
