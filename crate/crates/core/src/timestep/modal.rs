use crate::error::{config, Result};
use crate::fracops::mittag_leffler;
use std::f64::consts::PI;

/// `u(x, t) = sum_m a_m E_alpha(-kappa (m pi / L)^2 t^alpha) sin(m pi (x - x_L) / L)`,
/// the exact solution for constant `kappa`, `F = 0`, `g = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalSolution {
    pub x_left: f64,
    pub length: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub modes: Vec<(usize, f64)>,
}

impl ModalSolution {
    pub fn new(x_left: f64, x_right: f64, alpha: f64, kappa: f64, modes: Vec<(usize, f64)>) -> Result<Self> {
        if !(x_right > x_left) {
            return config(format!("degenerate interval [{x_left}, {x_right}]"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return config(format!("alpha = {alpha} outside (0, 1]"));
        }
        if !(kappa > 0.0) {
            return config(format!("kappa must be positive, got {kappa}"));
        }
        if modes.iter().any(|&(m, _)| m == 0) {
            return config("mode numbers start at 1");
        }
        Ok(ModalSolution { x_left, length: x_right - x_left, alpha, kappa, modes })
    }

    fn wavenumber(&self, m: usize) -> f64 {
        m as f64 * PI / self.length
    }

    /// Mode amplitudes `a_m E_alpha(-lambda_m t^alpha)` at time `t`.
    pub fn amplitudes(&self, t: f64) -> Result<Vec<f64>> {
        self.modes
            .iter()
            .map(|&(m, a)| {
                if t == 0.0 {
                    return Ok(a);
                }
                let lam = self.kappa * self.wavenumber(m).powi(2);
                Ok(a * mittag_leffler(self.alpha, -lam * t.powf(self.alpha))?)
            })
            .collect()
    }

    /// Closures `(u, du/dx)` at time `t`.
    pub fn profile(&self, t: f64) -> Result<(impl Fn(f64) -> f64 + '_, impl Fn(f64) -> f64 + '_)> {
        let amps = self.amplitudes(t)?;
        let amps2 = amps.clone();
        let u = move |x: f64| {
            self.modes
                .iter()
                .zip(&amps)
                .map(|(&(m, _), a)| a * (self.wavenumber(m) * (x - self.x_left)).sin())
                .sum()
        };
        let du = move |x: f64| {
            self.modes
                .iter()
                .zip(&amps2)
                .map(|(&(m, _), a)| {
                    let k = self.wavenumber(m);
                    a * k * (k * (x - self.x_left)).cos()
                })
                .sum()
        };
        Ok((u, du))
    }
}

/// Modal reference values at the given nodes and time.
pub fn modal_reference(
    nodes: &[f64],
    x_left: f64,
    x_right: f64,
    alpha: f64,
    kappa: f64,
    modes: &[(usize, f64)],
    t: f64,
) -> Result<Vec<f64>> {
    let sol = ModalSolution::new(x_left, x_right, alpha, kappa, modes.to_vec())?;
    let (u, _) = sol.profile(t)?;
    Ok(nodes.iter().map(|&x| u(x)).collect())
}
