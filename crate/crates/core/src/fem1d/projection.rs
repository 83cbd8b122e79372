use super::assembly::{assemble_mass, assemble_stiffness, gradient_load_vector, load_vector};
use super::banded::BandedOperator;
use super::coefficients::CoefficientField;
use super::mesh::FeSpace;
use crate::error::{config, Error, Result};

/// L2 orthogonal projection onto the FE space: `M c = (v, phi_i)`.
pub fn l2_project<F: Fn(f64) -> f64>(space: &FeSpace, v: F) -> Result<Vec<f64>> {
    let b = load_vector(space, v);
    let mass = assemble_mass(space);
    let chol = mass
        .cholesky()
        .map_err(|e| Error::Config(format!("mass matrix failed to factor: {e}")))?;
    Ok(chol.solve(&b))
}

/// Ritz projection: `(kappa R v', chi') + (R v, chi) = (kappa v', chi') + (v, chi)`.
pub fn ritz_project<F, G>(space: &FeSpace, coeffs: &CoefficientField, v: F, v_prime: G) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mesh = space.mesh();
    let (vl, vr) = (v(mesh.x_left()), v(mesh.x_right()));
    let probe = mesh.nodes().iter().fold(1.0f64, |m, &x| m.max(v(x).abs()));
    if vl.abs() > 1e-10 * probe || vr.abs() > 1e-10 * probe {
        return config(format!("Ritz projection needs v = 0 on the boundary, got v(x_L) = {vl:e}, v(x_R) = {vr:e}"));
    }
    let mut rhs = gradient_load_vector(space, |x| coeffs.kappa(x) * v_prime(x));
    for (r, l) in rhs.iter_mut().zip(load_vector(space, &v)) {
        *r += l;
    }
    let op = ritz_operator(space, coeffs)?;
    Ok(op.cholesky()?.solve(&rhs))
}

pub(crate) fn ritz_operator(space: &FeSpace, coeffs: &CoefficientField) -> Result<BandedOperator> {
    let a = assemble_stiffness(space, coeffs)?;
    Ok(BandedOperator::combine(1.0, &a, 1.0, &assemble_mass(space)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::{error_norms, Mesh1D};
    use crate::fracops::InnerProduct;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn slope(hs: &[f64], es: &[f64]) -> f64 {
        let n = hs.len() as f64;
        let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
        let ly: Vec<f64> = es.iter().map(|e| e.ln()).collect();
        let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
        let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        num / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
    }

    #[test]
    fn projections_reproduce_fe_functions() {
        let mesh = Mesh1D::new(vec![0.0, 0.1, 0.35, 0.5, 0.8, 1.0]).unwrap();
        let s = FeSpace::new(mesh);
        let c = vec![0.4, -1.0, 2.0, 0.7];
        let cc = c.clone();
        let ss = s.clone();
        let v = move |x: f64| ss.eval(&cc, x);
        let p = l2_project(&s, &v).unwrap();
        // piecewise derivative of the FE function
        let nodes = s.mesh().nodes().to_vec();
        let mut vals = vec![0.0];
        vals.extend(&c);
        vals.push(0.0);
        let dv = move |x: f64| {
            let e = nodes.partition_point(|&n| n <= x).clamp(1, nodes.len() - 1) - 1;
            (vals[e + 1] - vals[e]) / (nodes[e + 1] - nodes[e])
        };
        let k = CoefficientField::new(Arc::new(|x| 1.0 + x), 1.0).unwrap();
        let r = ritz_project(&s, &k, &v, dv).unwrap();
        for i in 0..4 {
            assert!((p[i] - c[i]).abs() < 1e-12);
            assert!((r[i] - c[i]).abs() < 1e-12);
        }
        assert_eq!(l2_project(&s, |_| 0.0).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn ritz_rejects_boundary_violation() {
        let s = FeSpace::uniform(0.0, 1.0, 5).unwrap();
        let k = CoefficientField::constant_kappa(1.0).unwrap();
        assert!(ritz_project(&s, &k, |x| x.cos(), |x| -x.sin()).is_err());
    }

    #[test]
    fn ritz_is_galerkin_orthogonal() {
        let s = FeSpace::uniform(0.0, 1.0, 20).unwrap();
        let k = CoefficientField::new(Arc::new(|x| 2.0 + (3.0 * x).sin()), 1.0).unwrap();
        let v = |x: f64| x * (1.0 - x) * (2.0 * x).exp();
        let dv = |x: f64| (1.0 - 2.0 * x + 2.0 * x * (1.0 - x)) * (2.0 * x).exp();
        let r = ritz_project(&s, &k, v, dv).unwrap();
        let op = ritz_operator(&s, &k).unwrap();
        let mut rhs = gradient_load_vector(&s, |x| k.kappa(x) * dv(x));
        for (a, b) in rhs.iter_mut().zip(load_vector(&s, v)) {
            *a += b;
        }
        let res = op.apply(&r);
        for (a, b) in res.iter().zip(&rhs) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(op.inner(&r, &r) > 0.0);
    }

    #[test]
    fn refinement_rates() {
        let v = |x: f64| (PI * x).sin();
        let dv = |x: f64| PI * (PI * x).cos();
        let k = CoefficientField::constant_kappa(1.0).unwrap();
        let (mut hs, mut l2p, mut l2r, mut h1r) = (vec![], vec![], vec![], vec![]);
        for m in [7, 15, 31, 63] {
            let s = FeSpace::uniform(0.0, 1.0, m).unwrap();
            hs.push(s.mesh().h());
            let p = l2_project(&s, v).unwrap();
            l2p.push(error_norms(&s, &p, v, dv).l2);
            let r = ritz_project(&s, &k, v, dv).unwrap();
            let e = error_norms(&s, &r, v, dv);
            l2r.push(e.l2);
            h1r.push(e.h1_semi);
        }
        assert!((slope(&hs, &l2p) - 2.0).abs() < 0.2);
        assert!((slope(&hs, &l2r) - 2.0).abs() < 0.2);
        assert!((slope(&hs, &h1r) - 1.0).abs() < 0.2);
    }
}
