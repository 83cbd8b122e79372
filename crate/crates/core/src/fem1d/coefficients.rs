use super::mesh::Mesh1D;
use crate::error::{config, Result};
use crate::quadrature::GaussRule;
use std::fmt;
use std::sync::Arc;

pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Diffusivity `kappa(x)`, forcing `F(x, t)` with its time derivative, and
/// source `g(x, t)`, with declared bounds.
#[derive(Clone)]
pub struct CoefficientField {
    kappa: SpaceFn,
    kappa_min: f64,
    kappa_const: Option<f64>,
    forcing: Option<(SpaceTimeFn, SpaceTimeFn)>,
    forcing_bound: f64,
    forcing_dt_bound: f64,
    source: Option<SpaceTimeFn>,
}

impl fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientField")
            .field("kappa_min", &self.kappa_min)
            .field("kappa_const", &self.kappa_const)
            .field("has_forcing", &self.forcing.is_some())
            .field("forcing_bound", &self.forcing_bound)
            .field("forcing_dt_bound", &self.forcing_dt_bound)
            .field("has_source", &self.source.is_some())
            .finish()
    }
}

impl CoefficientField {
    pub fn constant_kappa(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return config(format!("diffusivity must be positive, got {kappa}"));
        }
        let mut f = CoefficientField::new(Arc::new(move |_| kappa), kappa)?;
        f.kappa_const = Some(kappa);
        Ok(f)
    }

    pub fn new(kappa: SpaceFn, kappa_min: f64) -> Result<Self> {
        if !(kappa_min > 0.0) || !kappa_min.is_finite() {
            return config(format!("kappa_min must be positive, got {kappa_min}"));
        }
        Ok(CoefficientField {
            kappa,
            kappa_min,
            kappa_const: None,
            forcing: None,
            forcing_bound: 0.0,
            forcing_dt_bound: 0.0,
            source: None,
        })
    }

    /// Attaches `F` and `dF/dt` with their sup-norm bounds.
    pub fn with_forcing(mut self, f: SpaceTimeFn, f_dt: SpaceTimeFn, bound: f64, dt_bound: f64) -> Self {
        self.forcing = Some((f, f_dt));
        self.forcing_bound = bound;
        self.forcing_dt_bound = dt_bound;
        self
    }

    pub fn with_source(mut self, g: SpaceTimeFn) -> Self {
        self.source = Some(g);
        self
    }

    pub fn without_source(mut self) -> Self {
        self.source = None;
        self
    }

    pub fn kappa(&self, x: f64) -> f64 {
        (self.kappa)(x)
    }

    pub fn kappa_min(&self) -> f64 {
        self.kappa_min
    }

    /// `Some(kappa)` when the diffusivity was declared constant.
    pub fn kappa_constant(&self) -> Option<f64> {
        self.kappa_const
    }

    pub fn has_forcing(&self) -> bool {
        self.forcing.is_some()
    }

    pub fn forcing(&self, x: f64, t: f64) -> f64 {
        self.forcing.as_ref().map_or(0.0, |(f, _)| f(x, t))
    }

    pub fn forcing_dt(&self, x: f64, t: f64) -> f64 {
        self.forcing.as_ref().map_or(0.0, |(_, f)| f(x, t))
    }

    pub fn forcing_bounds(&self) -> (f64, f64) {
        (self.forcing_bound, self.forcing_dt_bound)
    }

    pub fn has_source(&self) -> bool {
        self.source.is_some()
    }

    pub fn source(&self, x: f64, t: f64) -> f64 {
        self.source.as_ref().map_or(0.0, |g| g(x, t))
    }

    /// Checks `kappa >= kappa_min` at the assembly quadrature points and
    /// that `F`, `dF/dt`, `g` are finite on a space-time sample grid.
    pub fn validate(&self, mesh: &Mesh1D, final_time: f64) -> Result<()> {
        let rule = GaussRule::new(3);
        for e in 0..mesh.num_elements() {
            let (a, b) = mesh.element(e);
            for (x, _) in rule.mapped(a, b) {
                let k = self.kappa(x);
                if !(k > 0.0) || k < self.kappa_min * (1.0 - 1e-12) || !k.is_finite() {
                    return config(format!("kappa({x}) = {k} violates kappa >= kappa_min = {}", self.kappa_min));
                }
            }
        }
        let samples = 17;
        for i in 0..samples {
            let x = mesh.x_left() + mesh.length() * i as f64 / (samples - 1) as f64;
            for j in 0..samples {
                let t = final_time * j as f64 / (samples - 1) as f64;
                let vals = [self.forcing(x, t), self.forcing_dt(x, t), self.source(x, t)];
                if vals.iter().any(|v| !v.is_finite()) {
                    return config(format!("coefficient not finite at (x, t) = ({x}, {t})"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_catches_bad_kappa() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 7).unwrap();
        let ok = CoefficientField::constant_kappa(2.0).unwrap();
        assert!(ok.validate(&mesh, 1.0).is_ok());
        assert_eq!(ok.kappa_constant(), Some(2.0));
        assert!(CoefficientField::constant_kappa(0.0).is_err());
        let dips = CoefficientField::new(Arc::new(|x| 1.0 - x), 0.5).unwrap();
        assert!(dips.validate(&mesh, 1.0).is_err());
        let blows = CoefficientField::constant_kappa(1.0)
            .unwrap()
            .with_source(Arc::new(|_, t| 1.0 / t));
        assert!(blows.validate(&mesh, 1.0).is_err());
    }

    #[test]
    fn absent_fields_are_zero() {
        let c = CoefficientField::constant_kappa(1.0).unwrap();
        assert_eq!(c.forcing(0.3, 0.2), 0.0);
        assert_eq!(c.source(0.3, 0.2), 0.0);
        assert!(!c.has_forcing() && !c.has_source());
    }
}
