use crate::config::{Experiment, ExperimentConfig, Projection};
use crate::report::{num, opt, Assertion, Outcome, Table};
use fracfp_core::analysis::{
    convergence_study, energy_check, gradient_sweep, lemma_property_suite, stability_sweep, ConvergenceSetup, DataCase,
    StabilityReport, ENERGY_TOL, MEMORY_TOL, SPREAD_LIMIT,
};
use fracfp_core::catalog;
use fracfp_core::fem1d::{assemble_mass, norms, CoefficientField, FeSpace};
use fracfp_core::fracops::InnerProduct;
use fracfp_core::timestep::{
    dg_solve_diffusion, solve_general_f, InitialProjection, SchemeConfig, TimePartition,
};
use serde_json::{json, Value};
use std::fmt;
use std::time::Instant;

/// Rate bands for piecewise-linear elements.
const L2_BAND: (f64, f64) = (1.8, 2.2);
const H1_BAND: (f64, f64) = (0.8, 1.2);

/// A solver failure, naming the case that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunError {
    pub case: String,
    pub message: String,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.case, self.message)
    }
}

fn fail<E: fmt::Display>(case: impl Into<String>) -> impl FnOnce(E) -> RunError {
    let case = case.into();
    move |e| RunError { case, message: e.to_string() }
}

fn projection(p: Projection) -> InitialProjection {
    match p {
        Projection::L2 => InitialProjection::L2,
        Projection::Ritz => InitialProjection::Ritz,
        Projection::Nodal => InitialProjection::Nodal,
    }
}

fn field(cfg: &ExperimentConfig, forcing: &str, source: &str) -> fracfp_core::Result<CoefficientField> {
    let d = &cfg.domain;
    catalog::coefficient_field(d.x_left, d.x_right, d.final_time, &cfg.coefficients.kappa, forcing, source)
}

fn scheme(cfg: &ExperimentConfig, alpha: f64) -> fracfp_core::Result<SchemeConfig> {
    let d = &cfg.domain;
    let c = &cfg.coefficients;
    let disc = &cfg.discretization;
    let u0 = catalog::initial_datum(d.x_left, d.x_right, &c.u0)?.datum;
    Ok(SchemeConfig::new(
        alpha,
        TimePartition::new(d.final_time, disc.steps.unwrap_or(1), cfg.grading())?,
        disc.degree,
        FeSpace::uniform(d.x_left, d.x_right, disc.dofs.unwrap_or(1))?,
        field(cfg, &c.forcing, &c.source)?,
        u0,
    )?
    .with_projection(projection(disc.projection)))
}

/// Runs a validated configuration.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let start = Instant::now();
    let mut out = match cfg.experiment {
        Experiment::Solve => solve(cfg),
        Experiment::StabilitySweep | Experiment::GradientSweep => sweep(cfg),
        Experiment::EnergyCheck => energy(cfg),
        Experiment::Convergence => convergence(cfg),
        Experiment::LemmaSuite => lemmas(cfg),
    }?;
    out.timings.push(("total".into(), start.elapsed().as_secs_f64()));
    Ok(out)
}

fn solve(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let alpha = cfg.alphas()[0];
    let case = format!("solve alpha={alpha}");
    let sc = scheme(cfg, alpha).map_err(fail(&case))?;
    let start = Instant::now();
    let u = if sc.coeffs.has_forcing() { solve_general_f(&sc) } else { dg_solve_diffusion(&sc) }.map_err(fail(&case))?;
    let secs = start.elapsed().as_secs_f64();

    let mass = assemble_mass(&sc.space);
    let mut table = Table::new("solution", &["n", "t", "l2", "h1_semi", "jump_l2"]);
    let mut l2 = Vec::new();
    for (n, &t) in u.times().iter().enumerate() {
        let v = u.end_value(n);
        let nv = norms(&sc.space, &v);
        // jump at t_n, U^n_+ - U^n_-; none at the final time
        let jump = (n < u.steps()).then(|| {
            let j = u.jump(n);
            mass.inner(&j, &j).max(0.0).sqrt()
        });
        l2.push(nv.l2);
        table.push(vec![json!(n), num(t), num(nv.l2), num(nv.h1_semi), opt(jump)]);
    }
    let mut profile = Table::new("profile", &["x", "u"]);
    let last = u.end_value(u.steps());
    for (i, &x) in sc.space.mesh().nodes().iter().enumerate() {
        let v = if i == 0 || i == last.len() + 1 { 0.0 } else { last[i - 1] };
        profile.push(vec![num(x), num(v)]);
    }

    let finite = l2.iter().all(|v| v.is_finite());
    let mut assertions = vec![Assertion::new("finite", finite, "every end value has a finite norm")];
    let max_l2 = l2[1..].iter().cloned().fold(0.0, f64::max);
    if !sc.coeffs.has_forcing() && !sc.coeffs.has_source() {
        let bound = l2[0] * (1.0 + 1e-8);
        assertions.push(Assertion::new(
            "contractive",
            max_l2 <= bound,
            format!("max_n ||U^n|| = {max_l2:.6e}, ||u0X|| = {:.6e}", l2[0]),
        ));
    }
    Ok(Outcome {
        tables: vec![table, profile],
        summary: json!({ "alpha": alpha, "initial_l2": num(l2[0]), "final_l2": num(*l2.last().unwrap()), "max_l2": num(max_l2) }),
        assertions,
        timings: vec![(case, secs)],
    })
}

fn sweep_tables(rep: &StabilityReport) -> (Table, Table, Vec<Assertion>) {
    let mut ratios = Table::new("ratios", &["case", "alpha", "time", "measured", "rhs", "ratio", "error"]);
    for r in &rep.records {
        ratios.push(vec![
            Value::from(r.case.as_str()),
            num(r.alpha),
            num(r.time),
            num(r.measured),
            num(r.rhs),
            opt(r.ratio),
            r.error.as_deref().map_or(Value::Null, Value::from),
        ]);
    }
    let mut spreads = Table::new("spreads", &["case", "min_ratio", "max_ratio", "spread", "limit", "passed"]);
    let mut assertions = Vec::new();
    for s in &rep.spreads {
        let (passed, detail) = match s.spread {
            Some(v) => (v <= SPREAD_LIMIT, format!("max/min ratio {v:.4} (limit {SPREAD_LIMIT})")),
            None => (true, "no finite ratios: zero data".to_string()),
        };
        spreads.push(vec![
            Value::from(s.case.as_str()),
            opt(s.min_ratio),
            opt(s.max_ratio),
            opt(s.spread),
            num(SPREAD_LIMIT),
            Value::from(passed),
        ]);
        assertions.push(Assertion::new(format!("spread:{}", s.case), passed, detail));
    }
    (ratios, spreads, assertions)
}

fn sweep(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let alphas = cfg.alphas();
    let d = &cfg.domain;
    let cases = cfg.sweep.as_ref().map(|s| s.cases.as_slice()).unwrap_or_default();
    let data: Vec<DataCase> = cases
        .iter()
        .map(|c| {
            let forcing = c.forcing.as_deref().unwrap_or(&cfg.coefficients.forcing);
            Ok(DataCase {
                label: c.label.clone(),
                coeffs: field(cfg, forcing, &c.source)?,
                u0: catalog::initial_datum(d.x_left, d.x_right, &c.u0)?.datum,
            })
        })
        .collect::<fracfp_core::Result<_>>()
        .map_err(fail("sweep setup"))?;
    let base = scheme(cfg, alphas[0]).map_err(fail("sweep setup"))?;
    let start = Instant::now();
    let rep = match cfg.experiment {
        Experiment::StabilitySweep => stability_sweep(&base, &alphas, &data),
        _ => gradient_sweep(&base, &alphas, &data),
    }
    .map_err(fail(cfg.experiment.to_string()))?;
    let secs = start.elapsed().as_secs_f64();
    if let Some(r) = rep.failures().next() {
        return Err(RunError {
            case: format!("case '{}' alpha={}", r.case, r.alpha),
            message: r.error.clone().unwrap_or_default(),
        });
    }
    let (ratios, spreads, assertions) = sweep_tables(&rep);
    Ok(Outcome {
        tables: vec![ratios, spreads],
        summary: json!({
            "kind": rep.kind,
            "dofs": rep.dofs,
            "steps": rep.steps,
            "grading": num(rep.grading),
            "degree": rep.degree,
            "spreads": rep.spreads,
        }),
        assertions,
        timings: vec![(cfg.experiment.to_string(), secs)],
    })
}

fn energy(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let alpha = cfg.alphas()[0];
    let case = format!("energy-check alpha={alpha}");
    let sc = scheme(cfg, alpha).map_err(fail(&case))?;
    let start = Instant::now();
    let u = dg_solve_diffusion(&sc).map_err(fail(&case))?;
    let led = energy_check(&u, &sc).map_err(fail(&case))?;
    let secs = start.elapsed().as_secs_f64();
    let mut table = Table::new("energy", &["n", "t", "end_sq", "jumps_sq", "memory", "rhs", "slack", "scale"]);
    for r in &led.rows {
        table.push(vec![
            json!(r.n),
            num(r.t),
            num(r.end_sq),
            num(r.jumps_sq),
            num(r.memory),
            num(r.rhs),
            num(r.slack),
            num(r.scale),
        ]);
    }
    let assertions = vec![
        Assertion::new(
            "inequality",
            led.worst_relative_slack >= -ENERGY_TOL,
            format!("min slack/scale {:.3e} (tolerance {ENERGY_TOL:e})", led.worst_relative_slack),
        ),
        Assertion::new(
            "memory-nonnegative",
            led.worst_relative_memory >= -MEMORY_TOL,
            format!("min memory/scale {:.3e}", led.worst_relative_memory),
        ),
        Assertion::new(
            "memory-cross-check",
            led.memory_mismatch <= MEMORY_TOL,
            format!("|memory - jump route| / scale = {:.3e} (tolerance {MEMORY_TOL:e})", led.memory_mismatch),
        ),
    ];
    Ok(Outcome {
        tables: vec![table],
        summary: json!({
            "alpha": alpha,
            "degree": led.degree,
            "initial_sq": num(led.initial_sq),
            "memory_check": num(led.memory_check),
            "memory_mismatch": num(led.memory_mismatch),
            "worst_relative_slack": num(led.worst_relative_slack),
            "worst_relative_memory": num(led.worst_relative_memory),
        }),
        assertions,
        timings: vec![(case, secs)],
    })
}

fn band_check(name: &str, slope: Option<f64>, band: (f64, f64)) -> Assertion {
    match slope {
        Some(s) => Assertion::new(
            format!("rate:{name}"),
            (band.0..=band.1).contains(&s),
            format!("fitted slope {s:.4}, band [{}, {}]", band.0, band.1),
        ),
        None => Assertion::new(format!("rate:{name}"), false, "fewer than two meshes"),
    }
}

fn convergence(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let alpha = cfg.alphas()[0];
    let case = format!("convergence alpha={alpha}");
    let d = &cfg.domain;
    let disc = &cfg.discretization;
    let modes = catalog::initial_datum(d.x_left, d.x_right, &cfg.coefficients.u0)
        .map_err(fail(&case))?
        .modes
        .unwrap_or_default();
    let kappa = field(cfg, "zero", "zero").map_err(fail(&case))?.kappa_constant().unwrap_or(1.0);
    let setup = ConvergenceSetup {
        alpha,
        kappa,
        x_left: d.x_left,
        x_right: d.x_right,
        modes,
        meshes: disc.meshes.clone().unwrap_or_default(),
        partition: TimePartition::new(d.final_time, disc.steps.unwrap_or(1), cfg.grading()).map_err(fail(&case))?,
        degree: disc.degree,
        projection: projection(disc.projection),
        time: cfg.convergence.as_ref().and_then(|c| c.time).unwrap_or(0.5 * d.final_time),
    };
    let start = Instant::now();
    let t = convergence_study(&setup).map_err(fail(&case))?;
    let secs = start.elapsed().as_secs_f64();
    let mut rates = Table::new("rates", &["dofs", "h", "error_l2", "error_h1"]);
    for r in &t.rows {
        rates.push(vec![json!(r.dofs), num(r.h), num(r.error_l2), num(r.error_h1)]);
    }
    let l2 = band_check("l2", t.slope_l2, L2_BAND);
    let h1 = band_check("h1", t.slope_h1, H1_BAND);
    let mut slopes = Table::new("slopes", &["norm", "slope", "halved_steps_slope", "lower", "upper", "passed"]);
    for (norm, s, half, band, a) in
        [("l2", t.slope_l2, t.halved_slope_l2, L2_BAND, &l2), ("h1", t.slope_h1, t.halved_slope_h1, H1_BAND, &h1)]
    {
        slopes.push(vec![Value::from(norm), opt(s), opt(half), num(band.0), num(band.1), Value::from(a.passed)]);
    }
    let temporal = Assertion::new(
        "spatial-error-dominates",
        !t.temporal_dominated,
        format!(
            "slopes with half the steps: l2 {}, h1 {}",
            t.halved_slope_l2.map_or("-".into(), |v| format!("{v:.4}")),
            t.halved_slope_h1.map_or("-".into(), |v| format!("{v:.4}"))
        ),
    );
    Ok(Outcome {
        tables: vec![rates, slopes],
        summary: json!({
            "alpha": alpha,
            "time": num(t.time),
            "steps": t.steps,
            "grading": num(t.grading),
            "degree": t.degree,
            "slope_l2": opt(t.slope_l2),
            "slope_h1": opt(t.slope_h1),
            "temporal_dominated": t.temporal_dominated,
        }),
        assertions: vec![l2, h1, temporal],
        timings: vec![(case, secs)],
    })
}

fn lemmas(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let trials = cfg.lemma_suite.as_ref().map_or(100, |l| l.trials);
    let start = Instant::now();
    let rep = lemma_property_suite(cfg.seed, trials).map_err(fail("lemma-suite"))?;
    let secs = start.elapsed().as_secs_f64();
    let mut table = Table::new("lemmas", &["check", "trials", "tolerance", "worst_relative_slack", "worst_trial", "passed"]);
    let mut assertions = Vec::new();
    for c in &rep.checks {
        table.push(vec![
            Value::from(c.name.as_str()),
            json!(c.trials),
            num(c.tolerance),
            num(c.worst_relative_slack),
            json!(c.worst_trial),
            Value::from(c.passed),
        ]);
        assertions.push(Assertion::new(
            format!("lemma:{}", c.name),
            c.passed,
            format!("worst relative slack {:.3e} at trial {} (tolerance {:e})", c.worst_relative_slack, c.worst_trial, c.tolerance),
        ));
    }
    Ok(Outcome {
        tables: vec![table],
        summary: json!({ "seed": rep.seed, "trials": rep.trials }),
        assertions,
        timings: vec![("lemma-suite".into(), secs)],
    })
}
