use super::kernel::{omega_pos, FracKernel};
use super::trajectory::PiecewiseTrajectory;
use crate::error::{domain, Result};
use crate::quadrature::GaussRule;

/// A symmetric positive semidefinite bilinear form on coefficient vectors.
pub trait InnerProduct {
    fn inner(&self, a: &[f64], b: &[f64]) -> f64;
}

/// The plain dot product.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl InnerProduct for Euclidean {
    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }
}

fn check_time(phi: &PiecewiseTrajectory, t: f64) -> Result<()> {
    let (t0, tn) = (phi.breakpoints()[0], phi.final_time());
    if !(t >= t0 && t <= tn) {
        return domain(format!("time {t} outside [{t0}, {tn}]"));
    }
    Ok(())
}

/// Riemann-Liouville derivative `d/dt I^alpha phi = phi(0) omega_alpha(t) + (I^alpha phi')(t)`
/// of a continuous trajectory.
pub fn rl_derivative_eval(phi: &PiecewiseTrajectory, alpha: f64, t: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha = {alpha} outside (0, 1]"));
    }
    if !(t > 0.0) {
        return domain(format!("Riemann-Liouville derivative needs t > 0, got {t}"));
    }
    check_time(phi, t)?;
    let tol = 1e-10 * (1.0 + phi.scale());
    if !phi.is_continuous(tol) {
        return domain(format!(
            "trajectory jumps by {:e} (> {tol:e}); the identity needs a continuous argument",
            phi.max_jump()
        ));
    }
    if alpha == 1.0 {
        return phi.eval(t);
    }
    let t0 = phi.breakpoints()[0];
    let mut out = phi.right_limit(0);
    let w = omega_pos(alpha, t - t0);
    out.iter_mut().for_each(|v| *v *= w);
    FracKernel::new(alpha)?.accumulate(&phi.derivative(), t, &mut out);
    Ok(out)
}

/// `(B_1 phi)(t) = int_0^t F(s) (d_s^{1-alpha} phi)(s) ds`, rewritten by parts as
/// `F(t) (I^alpha phi)(t) - int_0^t F'(s) (I^alpha phi)(s) ds`.
///
/// `field(s, out)` and `field_dt(s, out)` write `F` and `dF/dt` for each of
/// the `dim` components; the product with `phi` is componentwise. The outer
/// integral uses 4-point Gauss on each trajectory interval.
pub fn operator_b1(
    phi: &PiecewiseTrajectory,
    field: &dyn Fn(f64, &mut [f64]),
    field_dt: &dyn Fn(f64, &mut [f64]),
    alpha: f64,
    t: f64,
) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha = {alpha} outside (0, 1]"));
    }
    check_time(phi, t)?;
    let dim = phi.dim();
    let ker = FracKernel::new(alpha)?;
    let mut fv = vec![0.0; dim];
    let mut ia = vec![0.0; dim];

    ker.accumulate(phi, t, &mut ia);
    field(t, &mut fv);
    let mut out: Vec<f64> = fv.iter().zip(&ia).map(|(f, i)| f * i).collect();

    let rule = GaussRule::new(4);
    for n in 0..phi.num_intervals() {
        let (a, b) = phi.interval(n);
        if a >= t {
            break;
        }
        for (s, w) in rule.mapped(a, b.min(t)) {
            ia.iter_mut().for_each(|v| *v = 0.0);
            ker.accumulate(phi, s, &mut ia);
            field_dt(s, &mut fv);
            for ((o, f), i) in out.iter_mut().zip(&fv).zip(&ia) {
                *o -= w * f * i;
            }
        }
    }
    Ok(out)
}

/// `int_0^t <x(s), (I^mu y)(s)> ds`, in closed form.
///
/// On each interval of `x` the polynomial factor is integrated by parts until
/// it is exhausted, `int_a^b x (I^mu y) = sum_i (-1)^i [x^(i) I^{mu+1+i} y]_a^b`,
/// so only fractional integrals of `y` at the interval ends are needed.
pub fn history_cross_integral(
    x: &PiecewiseTrajectory,
    y: &PiecewiseTrajectory,
    mu: f64,
    t: f64,
    ip: &dyn InnerProduct,
) -> Result<f64> {
    if !(mu > 0.0) {
        return domain(format!("history integral needs mu > 0, got {mu}"));
    }
    check_time(x, t)?;
    check_time(y, t)?;
    let dim = x.dim();
    if y.dim() != dim {
        return domain("trajectories have different dimensions");
    }
    let max_p = x.degrees().iter().copied().max().unwrap_or(0);
    let kernels: Vec<FracKernel> = (0..=max_p)
        .map(|i| FracKernel::new(mu + 1.0 + i as f64))
        .collect::<Result<_>>()?;
    let mut derivs = vec![x.clone()];
    for i in 1..=max_p {
        let d = derivs[i - 1].derivative();
        derivs.push(d);
    }

    let frac_at = |order: usize, s: f64| {
        let mut v = vec![0.0; dim];
        kernels[order].accumulate(y, s, &mut v);
        v
    };
    let mut xv = vec![0.0; dim];
    let mut total = 0.0;
    let mut left_cache: Option<(f64, Vec<Vec<f64>>)> = None;
    for n in 0..x.num_intervals() {
        let (a, b) = x.interval(n);
        if a >= t {
            break;
        }
        let end = b.min(t);
        let p = x.degree(n);
        let left: Vec<Vec<f64>> = match left_cache.take() {
            Some((s, v)) if s == a && v.len() > p => v,
            _ => (0..=p).map(|i| frac_at(i, a)).collect(),
        };
        let right: Vec<Vec<f64>> = (0..=max_p).map(|i| frac_at(i, end)).collect();
        let tau_end = x.local_coordinate(n, end);
        for i in 0..=p {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            derivs[i].eval_local(n, tau_end, &mut xv);
            let at_end = ip.inner(&xv, &right[i]);
            derivs[i].eval_local(n, -1.0, &mut xv);
            let at_start = ip.inner(&xv, &left[i]);
            total += sign * (at_end - at_start);
        }
        left_cache = Some((end, right));
    }
    Ok(total)
}

/// `int_0^t <phi(s), (I^mu phi)(s)>_ip ds`; non-negative for `0 < mu < 1`.
pub fn history_inner_integral(phi: &PiecewiseTrajectory, mu: f64, t: f64, ip: &dyn InnerProduct) -> Result<f64> {
    history_cross_integral(phi, phi, mu, t, ip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::frac_integral_eval;
    use crate::quadrature::{integrate_graded, GaussRule};

    fn ramp() -> PiecewiseTrajectory {
        PiecewiseTrajectory::continuous_linear(vec![0.0, 0.5, 1.0], &[vec![0.0], vec![0.5], vec![1.0]]).unwrap()
    }

    #[test]
    fn rl_derivative_examples() {
        let one = PiecewiseTrajectory::constant(vec![0.0, 0.4, 1.0], &[1.0]).unwrap();
        for &t in &[0.2, 0.4, 0.9] {
            let v = rl_derivative_eval(&one, 0.5, t).unwrap()[0];
            assert!((v - omega_pos(0.5, t)).abs() < 1e-14);
        }
        let v = rl_derivative_eval(&ramp(), 0.5, 1.0).unwrap()[0];
        assert!((v - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-14);
        let quad = PiecewiseTrajectory::new(vec![0.0, 1.0, 2.0], vec![2, 1], vec![1.0, 0.5, 0.25, 1.75, 0.3], 1).unwrap();
        // continuous: right end of interval 0 = 1.75, left end of interval 1 = 1.45 -> not continuous
        assert!(rl_derivative_eval(&quad, 0.5, 1.5).is_err());
        assert_eq!(rl_derivative_eval(&ramp(), 1.0, 0.7).unwrap(), ramp().eval(0.7).unwrap());
        assert!(rl_derivative_eval(&ramp(), 0.5, 0.0).is_err());
    }

    #[test]
    fn b1_examples() {
        let one = PiecewiseTrajectory::constant(vec![0.0, 0.5, 1.0], &[1.0]).unwrap();
        let zero = |_: f64, o: &mut [f64]| o.iter_mut().for_each(|v| *v = 0.0);
        let unit = |_: f64, o: &mut [f64]| o.iter_mut().for_each(|v| *v = 1.0);
        let c = |_: f64, o: &mut [f64]| o.iter_mut().for_each(|v| *v = 2.5);
        assert_eq!(operator_b1(&one, &zero, &zero, 0.5, 0.8).unwrap(), vec![0.0]);
        let v = operator_b1(&one, &c, &zero, 1.0, 0.8).unwrap()[0];
        assert!((v - 2.0).abs() < 1e-14);
        let v = operator_b1(&one, &unit, &zero, 0.5, 0.7).unwrap()[0];
        assert!((v - omega_pos(1.5, 0.7)).abs() < 1e-14);
    }

    #[test]
    fn b1_with_time_dependent_field_matches_direct_quadrature() {
        // F(s) = 1 + s, phi = ramp: B1 = int_0^t (1+s) d/ds I^alpha phi ds
        let alpha = 0.6;
        let f = |s: f64, o: &mut [f64]| o[0] = 1.0 + s;
        let fd = |_: f64, o: &mut [f64]| o[0] = 1.0;
        let got = operator_b1(&ramp(), &f, &fd, alpha, 1.0).unwrap()[0];
        // phi(s) = s: d/ds I^alpha s = omega_{alpha+1}(s)
        let rule = GaussRule::new(16);
        let exact = integrate_graded(&rule, 0.0, 1.0, 40, |s| (1.0 + s) * omega_pos(alpha + 1.0, s));
        assert!((got - exact).abs() < 1e-5, "{got} vs {exact}");
    }

    #[test]
    fn history_integral_of_constant_is_closed_form() {
        for &mu in &[0.2, 0.5, 0.9] {
            let one = PiecewiseTrajectory::constant(vec![0.0, 0.3, 0.6, 1.0], &[1.0]).unwrap();
            for &t in &[0.45, 1.0] {
                let v = history_inner_integral(&one, mu, t, &Euclidean).unwrap();
                assert!((v - omega_pos(mu + 2.0, t)).abs() < 1e-14);
            }
        }
        let zero = PiecewiseTrajectory::constant(vec![0.0, 1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(history_inner_integral(&zero, 0.5, 1.0, &Euclidean).unwrap(), 0.0);
    }

    #[test]
    fn history_integral_matches_graded_quadrature() {
        let phi = PiecewiseTrajectory::new(
            vec![0.0, 0.25, 0.7, 1.0],
            vec![1, 2, 0],
            vec![0.3, -1.0, 1.2, 0.4, -0.8, -0.5],
            1,
        )
        .unwrap();
        let mu = 0.35;
        let rule = GaussRule::new(12);
        let mut exact = 0.0;
        for n in 0..3 {
            let (a, b) = phi.interval(n);
            exact += integrate_graded(&rule, a, b, 50, |s| {
                let v = phi.eval(s).unwrap()[0];
                let i = frac_integral_eval(&phi, mu, s).unwrap()[0];
                v * i
            });
        }
        let got = history_inner_integral(&phi, mu, 1.0, &Euclidean).unwrap();
        assert!((got - exact).abs() < 1e-11, "{got} vs {exact}");
    }
}
