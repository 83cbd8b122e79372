use crate::error::{domain, Result};
use std::f64::consts::PI;

/// `Psi(alpha) = pi^{-(1-alpha)} (2-alpha)^{2-alpha} (1-alpha)^{-(1-alpha)} / sin(pi alpha / 2)`,
/// with `Psi(1) = 1`.
pub fn psi(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha = {alpha} outside (0, 1]"));
    }
    if alpha == 1.0 {
        return Ok(1.0);
    }
    let b = 1.0 - alpha;
    // (1-alpha)^{-(1-alpha)} -> 1 as alpha -> 1; x ln x is fine down to x = 0+
    let ln = -b * PI.ln() + (2.0 - alpha) * (2.0 - alpha).ln() - b * b.ln();
    Ok(ln.exp() / (0.5 * PI * alpha).sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_values() {
        assert_eq!(psi(1.0).unwrap(), 1.0);
        assert!((psi(1.0 - 1e-12).unwrap() - 1.0).abs() < 1e-9);
        // direct evaluation of the formula in 40-digit arithmetic
        assert!((psi(0.5).unwrap() - 2.072_964_896_828_013).abs() < 1e-12);
        let small = 1e-3 * psi(1e-3).unwrap();
        assert!((small / (8.0 / (PI * PI)) - 1.0).abs() < 0.05);
        assert!(psi(0.0).is_err() && psi(1.2).is_err());
    }
}
