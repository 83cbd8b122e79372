//! Python module `fracfp`.

use fracfp_core::analysis::{self, DataCase, StabilityReport};
use fracfp_core::catalog;
use fracfp_core::fem1d::{assemble_mass, norms, FeSpace};
use fracfp_core::fracops::{self, InnerProduct, PiecewiseTrajectory};
use fracfp_core::timestep::{
    dg_solve_diffusion, solve_general_f, DiscreteSolution, InitialProjection, SchemeConfig, TimePartition,
};
use fracfp_core::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Singular { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Piecewise polynomial in time with vector values, Legendre coefficients
/// per interval.
#[pyclass(name = "Trajectory", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTrajectory(PiecewiseTrajectory);

#[pymethods]
impl PyTrajectory {
    /// `coeffs` is laid out interval by interval, then by Legendre index,
    /// then by component.
    #[new]
    fn new(breakpoints: Vec<f64>, degrees: Vec<usize>, coeffs: Vec<f64>, dim: usize) -> PyResult<Self> {
        PiecewiseTrajectory::new(breakpoints, degrees, coeffs, dim).map(PyTrajectory).map_err(to_py)
    }

    #[staticmethod]
    fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<Vec<f64>>) -> PyResult<Self> {
        PiecewiseTrajectory::piecewise_constant(breakpoints, &values).map(PyTrajectory).map_err(to_py)
    }

    #[staticmethod]
    fn continuous_linear(breakpoints: Vec<f64>, nodal: Vec<Vec<f64>>) -> PyResult<Self> {
        PiecewiseTrajectory::continuous_linear(breakpoints, &nodal).map(PyTrajectory).map_err(to_py)
    }

    #[getter]
    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn __call__(&self, t: f64) -> PyResult<Vec<f64>> {
        self.0.eval(t).map_err(to_py)
    }

    /// `(I^mu phi)(t)`.
    fn frac_integral(&self, mu: f64, t: f64) -> PyResult<Vec<f64>> {
        fracops::frac_integral_eval(&self.0, mu, t).map_err(to_py)
    }

    /// Riemann-Liouville derivative of order `1 - alpha` at `t`.
    fn rl_derivative(&self, alpha: f64, t: f64) -> PyResult<Vec<f64>> {
        fracops::rl_derivative_eval(&self.0, alpha, t).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Trajectory(intervals={}, dim={})", self.0.num_intervals(), self.0.dim())
    }
}

/// A fully discrete solution: nodal values of a piecewise-linear field,
/// piecewise polynomial in time.
#[pyclass(name = "Solution", frozen)]
struct PySolution {
    u: DiscreteSolution,
    space: FeSpace,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.u.times().to_vec()
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.space.mesh().interior_nodes().to_vec()
    }

    #[getter]
    fn steps(&self) -> usize {
        self.u.steps()
    }

    /// `U^n_-`; `n = 0` is the projected initial datum.
    fn end_value(&self, n: usize) -> PyResult<Vec<f64>> {
        if n > self.u.steps() {
            return Err(PyValueError::new_err(format!("step {n} beyond {}", self.u.steps())));
        }
        Ok(self.u.end_value(n))
    }

    fn value_at(&self, t: f64) -> PyResult<Vec<f64>> {
        self.u.value_at(t).map_err(to_py)
    }

    /// `(L2, H1-seminorm)` of `U^n_-` for every breakpoint.
    fn norms(&self) -> Vec<(f64, f64)> {
        (0..=self.u.steps())
            .map(|n| {
                let v = norms(&self.space, &self.u.end_value(n));
                (v.l2, v.h1_semi)
            })
            .collect()
    }

    /// `L2` norms of the jumps `U^n_+ - U^n_-`, `n = 0..N-1`.
    fn jumps(&self) -> Vec<f64> {
        let m = assemble_mass(&self.space);
        (0..self.u.steps())
            .map(|n| {
                let j = self.u.jump(n);
                m.inner(&j, &j).max(0.0).sqrt()
            })
            .collect()
    }

    /// The solution as a trajectory of nodal values.
    fn trajectory(&self) -> PyTrajectory {
        PyTrajectory(self.u.trajectory().clone())
    }
}

/// Keyword arguments shared by the solver entry points.
#[allow(clippy::too_many_arguments)]
fn scheme(
    alpha: f64,
    dofs: usize,
    steps: usize,
    degree: usize,
    grading: Option<f64>,
    kappa: &str,
    forcing: &str,
    source: &str,
    u0: &str,
    domain: (f64, f64),
    final_time: f64,
    projection: &str,
) -> PyResult<SchemeConfig> {
    let (xl, xr) = domain;
    let projection = match projection {
        "l2" => InitialProjection::L2,
        "ritz" => InitialProjection::Ritz,
        "nodal" => InitialProjection::Nodal,
        other => return Err(PyValueError::new_err(format!("unknown projection '{other}' (l2, ritz, nodal)"))),
    };
    let grading = grading.unwrap_or_else(|| TimePartition::default_grading(alpha));
    let cfg = SchemeConfig::new(
        alpha,
        TimePartition::new(final_time, steps, grading).map_err(to_py)?,
        degree,
        FeSpace::uniform(xl, xr, dofs).map_err(to_py)?,
        catalog::coefficient_field(xl, xr, final_time, kappa, forcing, source).map_err(to_py)?,
        catalog::initial_datum(xl, xr, u0).map_err(to_py)?.datum,
    )
    .map_err(to_py)?;
    Ok(cfg.with_projection(projection))
}

/// Solves with named catalog coefficients; a nonzero `forcing` selects the
/// piecewise-constant product-integration scheme.
#[pyfunction]
#[pyo3(signature = (
    alpha, dofs, steps, degree=0, grading=None, kappa="const1", forcing="zero", source="zero", u0="sin1",
    domain=(0.0, 1.0), final_time=1.0, projection="l2"
))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    alpha: f64,
    dofs: usize,
    steps: usize,
    degree: usize,
    grading: Option<f64>,
    kappa: &str,
    forcing: &str,
    source: &str,
    u0: &str,
    domain: (f64, f64),
    final_time: f64,
    projection: &str,
) -> PyResult<PySolution> {
    let cfg = scheme(alpha, dofs, steps, degree, grading, kappa, forcing, source, u0, domain, final_time, projection)?;
    let u = py
        .detach(|| if cfg.coeffs.has_forcing() { solve_general_f(&cfg) } else { dg_solve_diffusion(&cfg) })
        .map_err(to_py)?;
    Ok(PySolution { u, space: cfg.space })
}

/// Energy ledger of the DG solution as a dict.
#[pyfunction]
#[pyo3(signature = (
    alpha, dofs, steps, degree=0, grading=None, kappa="const1", source="zero", u0="sin1",
    domain=(0.0, 1.0), final_time=1.0, projection="l2"
))]
#[allow(clippy::too_many_arguments)]
fn energy_check<'py>(
    py: Python<'py>,
    alpha: f64,
    dofs: usize,
    steps: usize,
    degree: usize,
    grading: Option<f64>,
    kappa: &str,
    source: &str,
    u0: &str,
    domain: (f64, f64),
    final_time: f64,
    projection: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = scheme(alpha, dofs, steps, degree, grading, kappa, "zero", source, u0, domain, final_time, projection)?;
    let led = py
        .detach(|| dg_solve_diffusion(&cfg).and_then(|u| analysis::energy_check(&u, &cfg)))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("passed", led.passed)?;
    d.set_item("worst_relative_slack", led.worst_relative_slack)?;
    d.set_item("worst_relative_memory", led.worst_relative_memory)?;
    d.set_item("memory_mismatch", led.memory_mismatch)?;
    d.set_item("initial_sq", led.initial_sq)?;
    let rows: Vec<(usize, f64, f64, f64, f64, f64, f64)> =
        led.rows.iter().map(|r| (r.n, r.t, r.end_sq, r.jumps_sq, r.memory, r.rhs, r.slack)).collect();
    d.set_item("rows", rows)?;
    d.set_item("columns", ("n", "t", "end_sq", "jumps_sq", "memory", "rhs", "slack"))?;
    Ok(d)
}

fn sweep_dict<'py>(py: Python<'py>, rep: &StabilityReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let records: Vec<(String, f64, f64, f64, f64, Option<f64>)> =
        rep.records.iter().map(|r| (r.case.clone(), r.alpha, r.time, r.measured, r.rhs, r.ratio)).collect();
    d.set_item("records", records)?;
    d.set_item("columns", ("case", "alpha", "time", "measured", "rhs", "ratio"))?;
    let spreads = PyDict::new(py);
    for s in &rep.spreads {
        spreads.set_item(&s.case, s.spread)?;
    }
    d.set_item("spreads", spreads)?;
    let errors: Vec<(String, f64, String)> =
        rep.failures().map(|r| (r.case.clone(), r.alpha, r.error.clone().unwrap_or_default())).collect();
    d.set_item("errors", errors)?;
    Ok(d)
}

/// Ratio sweep over `alphas`; each case is `(label, forcing, source, u0)`.
#[pyfunction]
#[pyo3(signature = (kind, alphas, cases, dofs, steps, grading=None, kappa="const1", domain=(0.0, 1.0), final_time=1.0))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    kind: &str,
    alphas: Vec<f64>,
    cases: Vec<(String, String, String, String)>,
    dofs: usize,
    steps: usize,
    grading: Option<f64>,
    kappa: &str,
    domain: (f64, f64),
    final_time: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let (xl, xr) = domain;
    let data = cases
        .iter()
        .map(|(label, forcing, source, u0)| {
            Ok(DataCase {
                label: label.clone(),
                coeffs: catalog::coefficient_field(xl, xr, final_time, kappa, forcing, source)?,
                u0: catalog::initial_datum(xl, xr, u0)?.datum,
            })
        })
        .collect::<fracfp_core::Result<Vec<_>>>()
        .map_err(to_py)?;
    let lowest = alphas.iter().cloned().fold(1.0, f64::min);
    let grading = grading.or(Some(TimePartition::default_grading(lowest)));
    let base = scheme(lowest, dofs, steps, 0, grading, kappa, "zero", "zero", "zero", domain, final_time, "l2")?;
    let rep = py
        .detach(|| match kind {
            "stability" => Some(analysis::stability_sweep(&base, &alphas, &data)),
            "gradient" => Some(analysis::gradient_sweep(&base, &alphas, &data)),
            _ => None,
        })
        .ok_or_else(|| PyValueError::new_err(format!("unknown sweep kind '{kind}' (stability, gradient)")))?
        .map_err(to_py)?;
    sweep_dict(py, &rep)
}

/// Randomized lemma checks; returns `{name: (worst_relative_slack, passed)}`.
#[pyfunction]
#[pyo3(signature = (seed=0, trials=100))]
fn lemma_suite<'py>(py: Python<'py>, seed: u64, trials: usize) -> PyResult<Bound<'py, PyDict>> {
    let rep = py.detach(|| analysis::lemma_property_suite(seed, trials)).map_err(to_py)?;
    let d = PyDict::new(py);
    for c in &rep.checks {
        d.set_item(&c.name, (c.worst_relative_slack, c.passed))?;
    }
    Ok(d)
}

#[pyfunction]
fn mittag_leffler(alpha: f64, z: f64) -> PyResult<f64> {
    fracops::mittag_leffler(alpha, z).map_err(to_py)
}

#[pyfunction]
fn psi(alpha: f64) -> PyResult<f64> {
    analysis::psi(alpha).map_err(to_py)
}

/// `[(slot, id, formula)]`.
#[pyfunction]
fn catalog_entries() -> Vec<(String, &'static str, &'static str)> {
    catalog::entries().iter().map(|e| (e.slot.to_string(), e.id, e.formula)).collect()
}

#[pymodule]
#[pyo3(name = "fracfp")]
fn fracfp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(energy_check, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_suite, m)?)?;
    m.add_function(wrap_pyfunction!(mittag_leffler, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_entries, m)?)?;
    Ok(())
}
