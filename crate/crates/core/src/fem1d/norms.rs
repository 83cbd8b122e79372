use super::assembly::{assemble_mass, assemble_stiffness};
use super::coefficients::CoefficientField;
use super::mesh::FeSpace;
use crate::error::{config, Result};
use crate::fracops::InnerProduct;
use crate::quadrature::GaussRule;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Norms {
    pub l2: f64,
    pub h1_semi: f64,
}

/// Exact `L2` norm and `H1` seminorm of the FE function with coefficients `c`.
pub fn norms(space: &FeSpace, c: &[f64]) -> Norms {
    let mesh = space.mesh();
    let (mut l2, mut h1) = (0.0, 0.0);
    for e in 0..mesh.num_elements() {
        let (a, b) = mesh.element(e);
        let h = b - a;
        let (u, v) = space.element_values(c, e);
        l2 += h * (u * u + u * v + v * v) / 3.0;
        h1 += (v - u) * (v - u) / h;
    }
    Norms { l2: l2.sqrt(), h1_semi: h1.sqrt() }
}

/// `||u_h - u||` and `||u_h' - u'||` with 5-point Gauss per element.
pub fn error_norms<F, G>(space: &FeSpace, c: &[f64], u: F, du: G) -> Norms
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let rule = GaussRule::new(5);
    let mesh = space.mesh();
    let (mut l2, mut h1) = (0.0, 0.0);
    for e in 0..mesh.num_elements() {
        let (a, b) = mesh.element(e);
        let h = b - a;
        let (ul, ur) = space.element_values(c, e);
        let slope = (ur - ul) / h;
        for (x, w) in rule.mapped(a, b) {
            let uh = ul + slope * (x - a);
            l2 += w * (uh - u(x)).powi(2);
            h1 += w * (slope - du(x)).powi(2);
        }
    }
    Norms { l2: l2.sqrt(), h1_semi: h1.sqrt() }
}

/// `(x_R - x_L)^2 / pi^2`, the reciprocal of the first Dirichlet eigenvalue.
pub fn poincare_constant(x_l: f64, x_r: f64) -> Result<f64> {
    if !(x_r > x_l) || !(x_r - x_l).is_finite() {
        return config(format!("degenerate interval [{x_l}, {x_r}]"));
    }
    Ok((x_r - x_l).powi(2) / (PI * PI))
}

/// `max ||v||^2 / ||v'||^2` over the FE space, i.e. `1 / lambda_min` of the
/// pencil `(K, M)`, by inverse iteration.
pub fn max_rayleigh_ratio(space: &FeSpace) -> Result<f64> {
    let mass = assemble_mass(space);
    let stiff = assemble_stiffness(space, &CoefficientField::constant_kappa(1.0)?)?;
    let chol = stiff.cholesky()?;
    let mesh = space.mesh();
    let mut x: Vec<f64> = mesh
        .interior_nodes()
        .iter()
        .map(|&p| (PI * (p - mesh.x_left()) / mesh.length()).sin().max(1e-3))
        .collect();
    let mut ratio = 0.0;
    for _ in 0..500 {
        let y = chol.solve(&mass.apply(&x));
        let norm = mass.inner(&y, &y).sqrt();
        x = y.iter().map(|v| v / norm).collect();
        let next = 1.0 / stiff.inner(&x, &x);
        if (next - ratio).abs() <= 1e-15 * next {
            return Ok(next);
        }
        ratio = next;
    }
    Ok(ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hat_function_norms() {
        let s = FeSpace::uniform(0.0, 1.0, 9).unwrap();
        let mut c = vec![0.0; 9];
        c[4] = 1.0;
        let n = norms(&s, &c);
        assert!((n.h1_semi.powi(2) - 2.0 / 0.1).abs() < 1e-12);
        assert!((n.l2.powi(2) - 2.0 * 0.1 / 3.0).abs() < 1e-15);
        assert_eq!(norms(&s, &[0.0; 9]), Norms { l2: 0.0, h1_semi: 0.0 });
    }

    #[test]
    fn exact_norms_agree_with_operators() {
        let s = FeSpace::new(crate::fem1d::Mesh1D::new(vec![0.0, 0.2, 0.25, 0.7, 1.3]).unwrap());
        let c = [1.0, -0.5, 2.0];
        let n = norms(&s, &c);
        let m = assemble_mass(&s);
        let a = assemble_stiffness(&s, &CoefficientField::constant_kappa(1.0).unwrap()).unwrap();
        assert!((n.l2.powi(2) - m.inner(&c, &c)).abs() < 1e-14);
        assert!((n.h1_semi.powi(2) - a.inner(&c, &c)).abs() < 1e-12);
        let e = error_norms(&s, &c, |_| 0.0, |_| 0.0);
        assert!((e.l2 - n.l2).abs() < 1e-14 && (e.h1_semi - n.h1_semi).abs() < 1e-12);
    }

    #[test]
    fn poincare_inequality_for_random_fe_functions() {
        assert!((poincare_constant(0.0, 1.0).unwrap() - 0.101_321_183_642_337_77).abs() < 1e-16);
        assert!((poincare_constant(0.0, 2.0).unwrap() - 4.0 * 0.101_321_183_642_337_77).abs() < 1e-15);
        assert!(poincare_constant(1.0, 1.0).is_err());
        let s = FeSpace::uniform(0.0, 1.0, 30).unwrap();
        let c_omega = poincare_constant(0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let c: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = norms(&s, &c);
            assert!(n.l2.powi(2) <= c_omega * n.h1_semi.powi(2));
        }
    }

    #[test]
    fn rayleigh_ratio_approaches_poincare_constant_from_below() {
        let c_omega = poincare_constant(0.0, 1.0).unwrap();
        let mut prev = 0.0;
        for m in [3, 7, 15, 31] {
            let r = max_rayleigh_ratio(&FeSpace::uniform(0.0, 1.0, m).unwrap()).unwrap();
            assert!(r <= c_omega && r > prev);
            prev = r;
        }
        assert!((c_omega - prev) / c_omega < 1e-3);
    }
}
