//! Experiment configuration: a TOML document with one section per concern
//! and one per experiment kind. Unknown keys are rejected.

use fracfp_core::catalog::{self, Slot};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Solve,
    StabilitySweep,
    GradientSweep,
    EnergyCheck,
    Convergence,
    LemmaSuite,
}

impl Experiment {
    pub fn is_sweep(self) -> bool {
        matches!(self, Experiment::StabilitySweep | Experiment::GradientSweep)
    }

    fn name(self) -> &'static str {
        match self {
            Experiment::Solve => "solve",
            Experiment::StabilitySweep => "stability-sweep",
            Experiment::GradientSweep => "gradient-sweep",
            Experiment::EnergyCheck => "energy-check",
            Experiment::Convergence => "convergence",
            Experiment::LemmaSuite => "lemma-suite",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    #[serde(default)]
    pub x_left: f64,
    #[serde(default = "one")]
    pub x_right: f64,
    #[serde(default = "one")]
    pub final_time: f64,
}

impl Default for Domain {
    fn default() -> Self {
        Domain { x_left: 0.0, x_right: 1.0, final_time: 1.0 }
    }
}

fn one() -> f64 {
    1.0
}

fn const1() -> String {
    "const1".into()
}

fn zero_id() -> String {
    "zero".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    #[serde(default = "const1")]
    pub kappa: String,
    #[serde(default = "zero_id")]
    pub forcing: String,
    #[serde(default = "zero_id")]
    pub source: String,
    #[serde(default = "zero_id")]
    pub u0: String,
}

impl Default for Coefficients {
    fn default() -> Self {
        Coefficients { kappa: const1(), forcing: zero_id(), source: zero_id(), u0: zero_id() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    #[default]
    L2,
    Ritz,
    Nodal,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discretization {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<f64>>,
    /// Interior nodes of the uniform mesh.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dofs: Option<usize>,
    /// Mesh family for convergence studies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meshes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Defaults to `min(2 / alpha, 4)` for the smallest alpha.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grading: Option<f64>,
    #[serde(default)]
    pub degree: usize,
    #[serde(default)]
    pub projection: Projection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCase {
    pub label: String,
    #[serde(default = "zero_id")]
    pub u0: String,
    #[serde(default = "zero_id")]
    pub source: String,
    /// Falls back to `coefficients.forcing`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forcing: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub cases: Vec<SweepCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Convergence {
    /// Requested evaluation time; defaults to half the final time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaSuite {
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Both,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub domain: Domain,
    #[serde(default)]
    pub coefficients: Coefficients,
    #[serde(default)]
    pub discretization: Discretization,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<Convergence>,
    #[serde(rename = "lemma-suite", skip_serializing_if = "Option::is_none")]
    pub lemma_suite: Option<LemmaSuite>,
    #[serde(default)]
    pub output: Output,
}

/// A validation failure, located in the source text when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// 1-based line of `key` inside `[section]` (top level for `""`).
pub fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut header_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix('[') {
            current = h.trim_start_matches('[').trim_end_matches(']').trim().to_string();
            if current == section {
                header_line = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim().trim_matches('"') == key {
                    return Some(i + 1);
                }
            }
        }
    }
    header_line
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError {
            line: e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1),
            message: e.message().trim().to_string(),
        })?;
        cfg.validate(Some(text))?;
        Ok(cfg)
    }

    /// The effective configuration as TOML, without the output directory.
    /// Feeding it back in reproduces the run.
    pub fn echo(&self) -> String {
        let mut c = self.clone();
        c.output.dir = None;
        toml::to_string(&c).expect("configuration serializes")
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.echo().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Alphas the experiment runs at.
    pub fn alphas(&self) -> Vec<f64> {
        match (&self.discretization.alpha_grid, self.discretization.alpha) {
            (Some(g), _) => g.clone(),
            (None, Some(a)) => vec![a],
            (None, None) => Vec::new(),
        }
    }

    pub fn grading(&self) -> f64 {
        self.discretization.grading.unwrap_or_else(|| {
            let a = self.alphas().into_iter().fold(1.0, f64::min);
            fracfp_core::timestep::TimePartition::default_grading(a)
        })
    }

    pub fn validate(&self, text: Option<&str>) -> Result<(), ConfigError> {
        let at = |section: &str, key: &str, message: String| ConfigError {
            line: text.and_then(|t| locate(t, section, key)),
            message,
        };
        let d = &self.discretization;
        let dom = &self.domain;
        if !(dom.x_right > dom.x_left) || !dom.x_left.is_finite() || !dom.x_right.is_finite() {
            return Err(at("domain", "x_right", format!("empty domain [{}, {}]", dom.x_left, dom.x_right)));
        }
        if !(dom.final_time > 0.0) || !dom.final_time.is_finite() {
            return Err(at("domain", "final_time", format!("final_time must be positive, got {}", dom.final_time)));
        }
        let c = &self.coefficients;
        let check_ids = |section: &str, ids: &[(Slot, &str, &str)]| {
            for &(slot, key, id) in ids {
                if !catalog::entries().iter().any(|e| e.slot == slot && e.id == id) {
                    return Err(at(section, key, format!("unknown {slot} expression '{id}' (see `fracfp catalog`)")));
                }
            }
            Ok(())
        };
        check_ids(
            "coefficients",
            &[(Slot::Kappa, "kappa", &c.kappa), (Slot::F, "forcing", &c.forcing), (Slot::G, "source", &c.source), (Slot::U0, "u0", &c.u0)],
        )?;

        if self.experiment == Experiment::LemmaSuite {
            if self.lemma_suite.as_ref().is_some_and(|l| l.trials == 0) {
                return Err(at("lemma-suite", "trials", "trials must be positive".into()));
            }
            return Ok(());
        }

        let sweep = self.experiment.is_sweep();
        match (d.alpha, &d.alpha_grid) {
            (Some(_), Some(_)) => {
                return Err(at("discretization", "alpha_grid", "give either alpha or alpha_grid, not both".into()))
            }
            (None, None) => {
                let key = if sweep { "alpha_grid" } else { "alpha" };
                return Err(at("discretization", key, format!("{} needs discretization.{key}", self.experiment)));
            }
            (Some(_), None) if sweep => {
                return Err(at("discretization", "alpha", format!("{} needs alpha_grid, not alpha", self.experiment)))
            }
            (None, Some(_)) if !sweep => {
                return Err(at("discretization", "alpha_grid", format!("{} takes a single alpha", self.experiment)))
            }
            _ => {}
        }
        let alphas = self.alphas();
        if alphas.is_empty() {
            return Err(at("discretization", "alpha_grid", "alpha grid is empty".into()));
        }
        for &a in &alphas {
            let ok = if sweep { (0.1..=1.0).contains(&a) } else { a > 0.0 && a <= 1.0 };
            if !ok {
                let key = if sweep { "alpha_grid" } else { "alpha" };
                let range = if sweep { "[0.1, 1]" } else { "(0, 1]" };
                return Err(at("discretization", key, format!("alpha = {a} outside {range}")));
            }
        }
        let Some(steps) = d.steps else {
            return Err(at("discretization", "steps", "discretization.steps is required".into()));
        };
        if steps == 0 {
            return Err(at("discretization", "steps", "steps must be positive".into()));
        }
        if let Some(g) = d.grading {
            if !(g >= 1.0) || !g.is_finite() {
                return Err(at("discretization", "grading", format!("grading must be >= 1, got {g}")));
            }
        }
        if d.degree > 1 {
            return Err(at("discretization", "degree", format!("time degree {} not supported (0 or 1)", d.degree)));
        }

        if self.experiment == Experiment::Convergence {
            let Some(meshes) = &d.meshes else {
                return Err(at("discretization", "meshes", "convergence needs discretization.meshes".into()));
            };
            if d.dofs.is_some() {
                return Err(at("discretization", "dofs", "convergence uses meshes, not dofs".into()));
            }
            if meshes.is_empty() || meshes.contains(&0) || meshes.windows(2).any(|w| w[1] <= w[0]) {
                return Err(at("discretization", "meshes", "meshes must be positive and strictly increasing".into()));
            }
            if !matches!(c.kappa.as_str(), "const1" | "const2") {
                return Err(at("coefficients", "kappa", "convergence needs a constant kappa".into()));
            }
            if c.forcing != "zero" || c.source != "zero" {
                let key = if c.forcing != "zero" { "forcing" } else { "source" };
                return Err(at("coefficients", key, "convergence runs against the source-free diffusion solution".into()));
            }
            let modes = catalog::initial_datum(dom.x_left, dom.x_right, &c.u0).ok().and_then(|e| e.modes);
            if !modes.is_some_and(|m| !m.is_empty()) {
                return Err(at("coefficients", "u0", format!("u0 '{}' has no finite sine expansion", c.u0)));
            }
            if let Some(t) = self.convergence.as_ref().and_then(|c| c.time) {
                if !(t > 0.0 && t <= dom.final_time) {
                    return Err(at("convergence", "time", format!("time {t} outside (0, {}]", dom.final_time)));
                }
            }
        } else {
            match d.dofs {
                None => return Err(at("discretization", "dofs", "discretization.dofs is required".into())),
                Some(0) => return Err(at("discretization", "dofs", "dofs must be positive".into())),
                _ => {}
            }
            if d.meshes.is_some() {
                return Err(at("discretization", "meshes", format!("{} uses dofs, not meshes", self.experiment)));
            }
        }
        if sweep {
            let Some(s) = &self.sweep else {
                return Err(at("sweep", "cases", format!("{} needs a [sweep] section with cases", self.experiment)));
            };
            if s.cases.is_empty() {
                return Err(at("sweep", "cases", "sweep has no cases".into()));
            }
            for (i, case) in s.cases.iter().enumerate() {
                if case.label.is_empty() || s.cases[..i].iter().any(|o| o.label == case.label) {
                    return Err(at("sweep", "cases", format!("case labels must be unique and non-empty ('{}')", case.label)));
                }
                let forcing = case.forcing.as_deref().unwrap_or(&c.forcing);
                check_ids("sweep", &[(Slot::F, "forcing", forcing), (Slot::G, "source", &case.source), (Slot::U0, "u0", &case.u0)])
                    .map_err(|e| ConfigError { message: format!("case '{}': {}", case.label, e.message), ..e })?;
            }
        } else if self.sweep.is_some() {
            return Err(at("sweep", "cases", format!("[sweep] does not apply to {}", self.experiment)));
        }
        let forced = c.forcing != "zero"
            || self.sweep.as_ref().is_some_and(|s| s.cases.iter().any(|k| k.forcing.as_deref().is_some_and(|f| f != "zero")));
        if forced && d.degree != 0 {
            return Err(at("discretization", "degree", "a nonzero forcing needs degree = 0".into()));
        }
        if self.convergence.is_some() && self.experiment != Experiment::Convergence {
            return Err(at("convergence", "time", format!("[convergence] does not apply to {}", self.experiment)));
        }
        if self.lemma_suite.is_some() {
            return Err(at("lemma-suite", "trials", format!("[lemma-suite] does not apply to {}", self.experiment)));
        }
        if self.experiment == Experiment::EnergyCheck && c.forcing != "zero" {
            return Err(at("coefficients", "forcing", "energy-check needs forcing = \"zero\"".into()));
        }
        Ok(())
    }

    /// Applies `--alpha-grid`: the grid of a sweep, or the single alpha of
    /// any other experiment.
    pub fn override_alphas(&mut self, grid: Vec<f64>) -> Result<(), ConfigError> {
        if self.experiment == Experiment::LemmaSuite {
            return Err(ConfigError { line: None, message: "--alpha-grid does not apply to lemma-suite".into() });
        }
        if self.experiment.is_sweep() {
            self.discretization.alpha = None;
            self.discretization.alpha_grid = Some(grid);
        } else {
            if grid.len() != 1 {
                return Err(ConfigError {
                    line: None,
                    message: format!("{} takes a single alpha, --alpha-grid gave {}", self.experiment, grid.len()),
                });
            }
            self.discretization.alpha_grid = None;
            self.discretization.alpha = Some(grid[0]);
        }
        Ok(())
    }
}

/// Parses `0.3,0.7,1.0`; the empty string is the empty grid.
pub fn parse_grid(list: &str) -> Result<Vec<f64>, ConfigError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| ConfigError { line: None, message: format!("--alpha-grid: '{s}' is not a number") })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = r#"
experiment = "stability-sweep"

[coefficients]
forcing = "const1"

[discretization]
alpha_grid = [0.3, 0.7, 1.0]
dofs = 15
steps = 16

[sweep]
cases = [{ label = "u0", u0 = "sin1" }]
"#;

    #[test]
    fn parses_and_defaults() {
        let c = ExperimentConfig::parse(SWEEP).unwrap();
        assert_eq!(c.experiment, Experiment::StabilitySweep);
        assert_eq!(c.domain, Domain::default());
        assert_eq!(c.coefficients.kappa, "const1");
        assert_eq!(c.grading(), 4.0);
        assert_eq!(c.alphas(), vec![0.3, 0.7, 1.0]);
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = SWEEP.replace("dofs = 15", "dofs = 15\nmesh_size = 3");
        let e = ExperimentConfig::parse(&text).unwrap_err();
        assert!(e.message.contains("mesh_size"), "{e}");
        assert_eq!(e.line, Some(10));
    }

    #[test]
    fn validation_errors_point_at_keys() {
        let e = ExperimentConfig::parse(&SWEEP.replace("[0.3, 0.7, 1.0]", "[]")).unwrap_err();
        assert_eq!(e.line, Some(8));
        assert!(e.message.contains("empty"));
        let e = ExperimentConfig::parse(&SWEEP.replace("forcing = \"const1\"", "forcing = \"cubic\"")).unwrap_err();
        assert_eq!(e.line, Some(5), "{e}");
        let e = ExperimentConfig::parse(&SWEEP.replace("[0.3,", "[0.05,")).unwrap_err();
        assert!(e.message.contains("0.05"));
        let e = ExperimentConfig::parse(&SWEEP.replace("u0 = \"sin1\"", "u0 = \"sin9\"")).unwrap_err();
        assert!(e.message.contains("case 'u0'"), "{e}");
    }

    #[test]
    fn echo_round_trips_with_same_hash() {
        let mut c = ExperimentConfig::parse(SWEEP).unwrap();
        c.output.dir = Some("elsewhere".into());
        let back = ExperimentConfig::parse(&c.echo()).unwrap();
        assert_eq!(back.hash(), c.hash());
        assert_eq!(back.output.dir, None);
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn alpha_override() {
        let mut c = ExperimentConfig::parse(SWEEP).unwrap();
        c.override_alphas(parse_grid("0.5, 1").unwrap()).unwrap();
        assert_eq!(c.alphas(), vec![0.5, 1.0]);
        c.override_alphas(parse_grid("").unwrap()).unwrap();
        assert!(c.validate(None).is_err());
        assert!(parse_grid("0.5,x").is_err());
    }
}
