//! DG(1) at alpha = 1 against the classical two-stage DG(1) heat scheme,
//! assembled densely and solved with an LU factorization.

use fracfp_core::fem1d::{CoefficientField, FeSpace};
use fracfp_core::timestep::{dg_solve_diffusion, InitialDatum, InitialProjection, SchemeConfig, TimePartition};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use std::sync::Arc;

/// End values `U^n_-` of the classical scheme on uniform P1 with `kappa = 1`,
/// nodal initial data `sin(pi x)` and the time-independent source `s sin(pi x)`.
fn classical(m: usize, times: &[f64], s: f64) -> Vec<DVector<f64>> {
    let h = 1.0 / (m + 1) as f64;
    let tri = |d: f64, o: f64| {
        DMatrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
            0 => d,
            1 => o,
            _ => 0.0,
        })
    };
    let mass = tri(4.0 * h / 6.0, h / 6.0);
    let stiff = tri(2.0 / h, -1.0 / h);
    let load = DVector::from_fn(m, |i, _| {
        let x = (i + 1) as f64 * h;
        s * (PI * x).sin() * 2.0 * (1.0 - (PI * h).cos()) / (PI * PI * h)
    });
    let mut prev = DVector::from_fn(m, |i, _| (PI * (i + 1) as f64 * h).sin());
    let mut out = vec![prev.clone()];
    for w in times.windows(2) {
        let k = w[1] - w[0];
        // unknowns [V0; V1] at the two ends of the interval
        let mut sys = DMatrix::zeros(2 * m, 2 * m);
        sys.view_mut((0, 0), (m, m)).copy_from(&(&mass * 0.5 + &stiff * (k / 3.0)));
        sys.view_mut((0, m), (m, m)).copy_from(&(&mass * 0.5 + &stiff * (k / 6.0)));
        sys.view_mut((m, 0), (m, m)).copy_from(&(&mass * -0.5 + &stiff * (k / 6.0)));
        sys.view_mut((m, m), (m, m)).copy_from(&(&mass * 0.5 + &stiff * (k / 3.0)));
        let mut rhs = DVector::zeros(2 * m);
        rhs.rows_mut(0, m).copy_from(&(&mass * &prev + &load * (0.5 * k)));
        rhs.rows_mut(m, m).copy_from(&(&load * (0.5 * k)));
        let v = sys.lu().solve(&rhs).expect("nonsingular");
        prev = v.rows(m, m).into_owned();
        out.push(prev.clone());
    }
    out
}

fn check(partition: TimePartition, s: f64) {
    let m = 31;
    let mut coeffs = CoefficientField::constant_kappa(1.0).unwrap();
    if s != 0.0 {
        coeffs = coeffs.with_source(Arc::new(move |x, _| s * (PI * x).sin()));
    }
    let cfg = SchemeConfig::new(
        1.0,
        partition,
        1,
        FeSpace::uniform(0.0, 1.0, m).unwrap(),
        coeffs,
        InitialDatum::new(Arc::new(|x| (PI * x).sin()), None),
    )
    .unwrap()
    .with_projection(InitialProjection::Nodal);
    let u = dg_solve_diffusion(&cfg).unwrap();
    let reference = classical(m, &partition.points(), s);
    for (n, r) in reference.iter().enumerate() {
        let err = u.end_value(n).iter().zip(r.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "step {n}: {err:e}");
    }
}

#[test]
fn uniform_steps_without_source() {
    check(TimePartition::uniform(1.0, 20).unwrap(), 0.0);
}

#[test]
fn graded_steps_with_source() {
    check(TimePartition::new(0.8, 24, 2.5).unwrap(), 2.0);
}
