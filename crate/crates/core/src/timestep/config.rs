use super::partition::TimePartition;
use crate::error::{config, Result};
use crate::fem1d::{l2_project, ritz_project, CoefficientField, FeSpace, SpaceFn};
use std::fmt;
use std::sync::Arc;

/// How the initial datum enters the finite element space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialProjection {
    #[default]
    L2,
    Ritz,
    Nodal,
}

/// `u_0` and (for the Ritz projection) its derivative.
#[derive(Clone)]
pub struct InitialDatum {
    value: SpaceFn,
    derivative: Option<SpaceFn>,
    zero: bool,
}

impl fmt::Debug for InitialDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialDatum")
            .field("zero", &self.zero)
            .field("has_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl InitialDatum {
    pub fn new(value: SpaceFn, derivative: Option<SpaceFn>) -> Self {
        InitialDatum { value, derivative, zero: false }
    }

    pub fn zero() -> Self {
        InitialDatum { value: Arc::new(|_| 0.0), derivative: Some(Arc::new(|_| 0.0)), zero: true }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn derivative(&self) -> Option<&SpaceFn> {
        self.derivative.as_ref()
    }
}

/// Everything a fully discrete solve needs.
#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub alpha: f64,
    pub partition: TimePartition,
    pub degree: usize,
    pub space: FeSpace,
    pub coeffs: CoefficientField,
    pub u0: InitialDatum,
    pub projection: InitialProjection,
}

impl SchemeConfig {
    pub fn new(
        alpha: f64,
        partition: TimePartition,
        degree: usize,
        space: FeSpace,
        coeffs: CoefficientField,
        u0: InitialDatum,
    ) -> Result<Self> {
        let cfg = SchemeConfig { alpha, partition, degree, space, coeffs, u0, projection: InitialProjection::L2 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_projection(mut self, projection: InitialProjection) -> Self {
        self.projection = projection;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return config(format!("alpha = {} outside (0, 1]", self.alpha));
        }
        if self.degree > 1 {
            return config(format!("time degree {} not supported (0 or 1)", self.degree));
        }
        self.coeffs.validate(self.space.mesh(), self.partition.final_time())
    }

    /// `u_{0X}` according to the selected projection.
    pub fn initial_vector(&self) -> Result<Vec<f64>> {
        if self.u0.is_zero() {
            return Ok(vec![0.0; self.space.dofs()]);
        }
        let u0 = &self.u0;
        match self.projection {
            InitialProjection::L2 => l2_project(&self.space, |x| u0.value(x)),
            InitialProjection::Nodal => Ok(self.space.interpolate(|x| u0.value(x))),
            InitialProjection::Ritz => {
                let Some(du) = u0.derivative() else {
                    return config("Ritz projection of u0 needs its derivative");
                };
                ritz_project(&self.space, &self.coeffs, |x| u0.value(x), |x| du(x))
            }
        }
    }
}
