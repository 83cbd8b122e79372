use super::source_norms;
use crate::error::{config, Result};
use crate::fem1d::{assemble_mass, norms, CoefficientField};
use crate::fracops::InnerProduct;
use crate::timestep::{dg_solve_diffusion, solve_general_f, DiscreteSolution, InitialDatum, SchemeConfig};
use rayon::prelude::*;

/// Largest accepted max/min ratio spread across the alpha grid.
pub const SPREAD_LIMIT: f64 = 3.0;

/// Data for one sweep case; mesh, partition and degree come from the base config.
#[derive(Debug, Clone)]
pub struct DataCase {
    pub label: String,
    pub coeffs: CoefficientField,
    pub u0: InitialDatum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// `max_n ||U^n_-|| / RHS(T)`
    Stability,
    /// `t*^{alpha/2} ||grad U(t*)|| / RHS(t*)`
    Gradient,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepRecord {
    pub case: String,
    pub alpha: f64,
    /// Time at which the measured quantity and the functional are taken.
    pub time: f64,
    pub measured: f64,
    pub rhs: f64,
    /// `None` is the `0/0` sentinel for identically zero data.
    pub ratio: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CaseSpread {
    pub case: String,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    /// `max / min`, `None` when fewer than one finite ratio exists.
    pub spread: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StabilityReport {
    pub kind: SweepKind,
    pub dofs: usize,
    pub steps: usize,
    pub grading: f64,
    pub final_time: f64,
    pub degree: usize,
    /// Ordered by case, then by position in the alpha grid.
    pub records: Vec<SweepRecord>,
    pub spreads: Vec<CaseSpread>,
}

impl StabilityReport {
    pub fn ratio(&self, case: &str, alpha: f64) -> Option<f64> {
        self.records.iter().find(|r| r.case == case && r.alpha == alpha).and_then(|r| r.ratio)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepRecord> {
        self.records.iter().filter(|r| r.error.is_some())
    }
}

fn solve(cfg: &SchemeConfig) -> Result<DiscreteSolution> {
    if cfg.coeffs.has_forcing() {
        solve_general_f(cfg)
    } else {
        dg_solve_diffusion(cfg)
    }
}

fn check_inputs(alphas: &[f64], cases: &[DataCase]) -> Result<()> {
    if alphas.is_empty() {
        return config("empty alpha grid");
    }
    if let Some(a) = alphas.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
        return config(format!("alpha = {a} outside (0, 1]"));
    }
    if cases.is_empty() {
        return config("no data cases");
    }
    if cases.iter().all(|c| c.u0.is_zero() && !c.coeffs.has_source()) {
        return config("every data case is identically zero");
    }
    Ok(())
}

/// Index of the breakpoint nearest to `t`, excluding `t_0`.
fn nearest_breakpoint(times: &[f64], t: f64) -> usize {
    (1..times.len())
        .min_by(|&i, &j| (times[i] - t).abs().total_cmp(&(times[j] - t).abs()))
        .unwrap_or(1)
}

fn run_one(base: &SchemeConfig, kind: SweepKind, case: &DataCase, alpha: f64) -> SweepRecord {
    let mut rec = SweepRecord {
        case: case.label.clone(),
        alpha,
        time: 0.0,
        measured: 0.0,
        rhs: 0.0,
        ratio: None,
        error: None,
    };
    let result = (|| -> Result<(f64, f64, f64)> {
        let mut cfg = base.clone();
        cfg.alpha = alpha;
        cfg.coeffs = case.coeffs.clone();
        cfg.u0 = case.u0.clone();
        cfg.validate()?;
        let u = solve(&cfg)?;
        let times = u.times();
        let mass = assemble_mass(&cfg.space);
        let src = source_norms(&cfg.space, &cfg.coeffs, times);
        let init = mass.inner(u.initial(), u.initial()).sqrt();
        match kind {
            SweepKind::Stability => {
                let n = times.len() - 1;
                let measured = (1..=n)
                    .map(|k| {
                        let v = u.end_value(k);
                        mass.inner(&v, &v).sqrt()
                    })
                    .fold(0.0, f64::max);
                Ok((times[n], measured, src.functional(init, n, times[n])))
            }
            SweepKind::Gradient => {
                let n = nearest_breakpoint(times, 0.5 * cfg.partition.final_time());
                let t = times[n];
                let grad = norms(&cfg.space, &u.end_value(n)).h1_semi;
                Ok((t, t.powf(0.5 * alpha) * grad, src.functional(init, n, t)))
            }
        }
    })();
    match result {
        Ok((t, measured, rhs)) => {
            rec.time = t;
            rec.measured = measured;
            rec.rhs = rhs;
            rec.ratio = if rhs > 0.0 { Some(measured / rhs) } else { None };
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

fn sweep(base: &SchemeConfig, kind: SweepKind, alphas: &[f64], cases: &[DataCase]) -> Result<StabilityReport> {
    check_inputs(alphas, cases)?;
    let jobs: Vec<(usize, usize)> = (0..cases.len()).flat_map(|c| (0..alphas.len()).map(move |a| (c, a))).collect();
    // collect() on an indexed parallel iterator keeps job order
    let records: Vec<SweepRecord> =
        jobs.par_iter().map(|&(c, a)| run_one(base, kind, &cases[c], alphas[a])).collect();
    let spreads = cases
        .iter()
        .map(|c| {
            let ratios: Vec<f64> = records.iter().filter(|r| r.case == c.label).filter_map(|r| r.ratio).collect();
            let min = ratios.iter().copied().reduce(f64::min);
            let max = ratios.iter().copied().reduce(f64::max);
            let spread = match (min, max) {
                (Some(lo), Some(hi)) if lo > 0.0 => Some(hi / lo),
                _ => None,
            };
            CaseSpread { case: c.label.clone(), min_ratio: min, max_ratio: max, spread }
        })
        .collect();
    Ok(StabilityReport {
        kind,
        dofs: base.space.dofs(),
        steps: base.partition.steps(),
        grading: base.partition.grading(),
        final_time: base.partition.final_time(),
        degree: if base.coeffs.has_forcing() { 0 } else { base.degree },
        records,
        spreads,
    })
}

/// Runs every case at every alpha and records `max_n ||U^n_-||` against the
/// stability functional at `T`. Solver failures are recorded per record.
pub fn stability_sweep(base: &SchemeConfig, alphas: &[f64], cases: &[DataCase]) -> Result<StabilityReport> {
    sweep(base, SweepKind::Stability, alphas, cases)
}

/// As [`stability_sweep`] for `t*^{alpha/2} ||grad U(t*)||`, with `t*` the
/// breakpoint nearest to `T/2`.
pub fn gradient_sweep(base: &SchemeConfig, alphas: &[f64], cases: &[DataCase]) -> Result<StabilityReport> {
    sweep(base, SweepKind::Gradient, alphas, cases)
}
