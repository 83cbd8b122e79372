use super::banded::BandedOperator;
use super::coefficients::CoefficientField;
use super::mesh::FeSpace;
use crate::error::{config, Result};
use crate::quadrature::GaussRule;

/// Element-by-element assembly of a 2x2 local matrix into the interior
/// block; rows and columns of boundary nodes are dropped.
fn assemble<F: FnMut(usize, f64, f64) -> [[f64; 2]; 2]>(space: &FeSpace, mut local: F) -> BandedOperator {
    let m = space.dofs();
    let mesh = space.mesh();
    let mut op = BandedOperator::zeros(m);
    for e in 0..mesh.num_elements() {
        let (a, b) = mesh.element(e);
        let k = local(e, a, b);
        // local node 0 is global interior dof e-1, local node 1 is dof e
        let dof = |l: usize| -> Option<usize> {
            let g = e + l;
            (g >= 1 && g <= m).then(|| g - 1)
        };
        for (r, row) in k.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if let (Some(i), Some(j)) = (dof(r), dof(c)) {
                    op.add(i, j, *v);
                }
            }
        }
    }
    op.refresh_symmetry();
    op
}

/// `M_ij = int phi_j phi_i`, exact.
pub fn assemble_mass(space: &FeSpace) -> BandedOperator {
    assemble(space, |_, a, b| {
        let h = b - a;
        [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]]
    })
}

/// `A_ij = int kappa phi_j' phi_i'`, 3-point Gauss per element.
pub fn assemble_stiffness(space: &FeSpace, coeffs: &CoefficientField) -> Result<BandedOperator> {
    let rule = GaussRule::new(3);
    let mut bad = None;
    let op = assemble(space, |_, a, b| {
        let h = b - a;
        let mut kint = 0.0;
        for (x, w) in rule.mapped(a, b) {
            let k = coeffs.kappa(x);
            if !(k > 0.0) && bad.is_none() {
                bad = Some((x, k));
            }
            kint += w * k;
        }
        let s = kint / (h * h);
        [[s, -s], [-s, s]]
    });
    if let Some((x, k)) = bad {
        return config(format!("kappa({x}) = {k} is not positive"));
    }
    Ok(op)
}

/// `C(t)_ij = int F(x, t) phi_j phi_i'`, 3-point Gauss per element.
pub fn assemble_convection(space: &FeSpace, coeffs: &CoefficientField, t: f64) -> BandedOperator {
    let rule = GaussRule::new(3);
    assemble(space, |_, a, b| {
        let h = b - a;
        // m0 = int F phi_left, m1 = int F phi_right
        let (mut m0, mut m1) = (0.0, 0.0);
        for (x, w) in rule.mapped(a, b) {
            let f = coeffs.forcing(x, t);
            let r = (x - a) / h;
            m0 += w * f * (1.0 - r);
            m1 += w * f * r;
        }
        [[-m0 / h, -m1 / h], [m0 / h, m1 / h]]
    })
}

/// `b_i = int f phi_i`, 5-point Gauss per element.
pub fn load_vector<F: Fn(f64) -> f64>(space: &FeSpace, f: F) -> Vec<f64> {
    let rule = GaussRule::new(5);
    let m = space.dofs();
    let mesh = space.mesh();
    let mut b = vec![0.0; m];
    for e in 0..mesh.num_elements() {
        let (xl, xr) = mesh.element(e);
        let h = xr - xl;
        let (mut l0, mut l1) = (0.0, 0.0);
        for (x, w) in rule.mapped(xl, xr) {
            let v = f(x);
            let r = (x - xl) / h;
            l0 += w * v * (1.0 - r);
            l1 += w * v * r;
        }
        if e >= 1 {
            b[e - 1] += l0;
        }
        if e < m {
            b[e] += l1;
        }
    }
    b
}

/// `b_i = int f phi_i'`, 5-point Gauss per element.
pub fn gradient_load_vector<F: Fn(f64) -> f64>(space: &FeSpace, f: F) -> Vec<f64> {
    let rule = GaussRule::new(5);
    let m = space.dofs();
    let mesh = space.mesh();
    let mut b = vec![0.0; m];
    for e in 0..mesh.num_elements() {
        let (xl, xr) = mesh.element(e);
        let h = xr - xl;
        let s = rule.integrate(xl, xr, &f) / h;
        if e >= 1 {
            b[e - 1] -= s;
        }
        if e < m {
            b[e] += s;
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::InnerProduct;
    use std::sync::Arc;

    #[test]
    fn single_dof_examples() {
        let s = FeSpace::uniform(0.0, 1.0, 1).unwrap();
        assert!((assemble_mass(&s).get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        let one = CoefficientField::constant_kappa(1.0).unwrap();
        assert!((assemble_stiffness(&s, &one).unwrap().get(0, 0) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn uniform_band_values() {
        let s = FeSpace::uniform(0.0, 1.0, 9).unwrap();
        let h = 0.1;
        let m = assemble_mass(&s);
        let one = CoefficientField::constant_kappa(1.0).unwrap();
        let a = assemble_stiffness(&s, &one).unwrap();
        for i in 0..9 {
            assert!((m.get(i, i) - 2.0 * h / 3.0).abs() < 1e-15);
            assert!((a.get(i, i) - 2.0 / h).abs() < 1e-12);
            if i < 8 {
                assert!((m.get(i, i + 1) - h / 6.0).abs() < 1e-15);
                assert!((a.get(i, i + 1) + 1.0 / h).abs() < 1e-12);
            }
        }
        assert!(m.is_symmetric() && a.is_symmetric());
        assert!(m.cholesky().is_ok() && a.cholesky().is_ok());
    }

    #[test]
    fn stiffness_integrates_quadratic_kappa_exactly() {
        let s = FeSpace::new(crate::fem1d::Mesh1D::new(vec![0.0, 0.3, 1.0]).unwrap());
        let k = CoefficientField::new(Arc::new(|x| 1.0 + x * x), 1.0).unwrap();
        let a = assemble_stiffness(&s, &k).unwrap();
        let exact = (0.3 + 0.009) / 0.09 + (0.7 + (1.0 - 0.027) / 3.0) / 0.49;
        assert!((a.get(0, 0) - exact).abs() < 1e-13);
    }

    #[test]
    fn convection_with_unit_field() {
        let s = FeSpace::uniform(0.0, 1.0, 6).unwrap();
        let zero = CoefficientField::constant_kappa(1.0).unwrap();
        assert_eq!(assemble_convection(&s, &zero, 0.3).max_abs(), 0.0);
        let unit = zero.with_forcing(Arc::new(|_, _| 1.0), Arc::new(|_, _| 0.0), 1.0, 0.0);
        let c = assemble_convection(&s, &unit, 0.3);
        for i in 0..6 {
            assert!(c.get(i, i).abs() < 1e-15);
            if i < 5 {
                assert!((c.get(i, i + 1) + 0.5).abs() < 1e-15);
                assert!((c.get(i + 1, i) - 0.5).abs() < 1e-15);
            }
        }
        // skew: x^T C x = 0 for constant F
        let x = [0.3, -1.0, 2.0, 0.1, 0.0, 1.5];
        assert!(c.inner(&x, &x).abs() < 1e-14);
    }
}
