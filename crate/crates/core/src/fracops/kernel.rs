//! The Riemann-Liouville kernel `omega_mu(t) = t^(mu-1) / Gamma(mu)` and its
//! exact moments against the local Legendre basis of a trajectory interval.
//!
//! For an interval `[a, b]` of length `k` and an evaluation time `t >= a`
//! the weights are
//!
//! `w_j = int_a^min(b,t) omega_mu(t - s) P_j(tau(s)) ds`.
//!
//! Two closed forms are used:
//!
//! * near field (`t - b < k/2`): repeated integration by parts,
//!   `int_a^b omega_mu(t-s) p(s) ds = sum_i [omega_{mu+1+i}(t-a) p^(i)(a) - omega_{mu+1+i}(t-b) p^(i)(b)]`,
//!   which terminates because `p` is a polynomial;
//! * far field: the binomial series of `(1 - rho tau)^(mu-1)` about the
//!   interval midpoint `c`, `rho = k / (2 (t - c)) <= 1/2`, integrated term by
//!   term against `P_j`. All terms share one sign pattern, so the long
//!   history does not cancel.

use super::gamma::rgamma;
use super::trajectory::{legendre_endpoint_derivative, PiecewiseTrajectory, MAX_DEGREE};
use crate::error::{domain, Result};

/// `omega_mu(t)` for `mu > 0`, `t > 0`.
pub fn omega(mu: f64, t: f64) -> Result<f64> {
    if !(mu > 0.0) || !mu.is_finite() {
        return domain(format!("kernel order must be positive, got {mu}"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("kernel argument must be positive, got {t}"));
    }
    Ok(omega_pos(mu, t))
}

/// `omega_mu(x)` for `x > 0`, and `0` for `x <= 0` (only used with `mu > 1`,
/// where the kernel vanishes at the origin).
#[inline]
pub(crate) fn omega_pos(mu: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if mu == 1.0 {
        return 1.0;
    }
    x.powf(mu - 1.0) * rgamma(mu)
}

/// Cached Gamma values for a fixed kernel order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracKernel {
    mu: f64,
    rgamma: [f64; MAX_DEGREE + 2],
}

impl FracKernel {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return domain(format!("kernel order must be positive, got {mu}"));
        }
        let mut r = [0.0; MAX_DEGREE + 2];
        for (i, v) in r.iter_mut().enumerate() {
            *v = rgamma(mu + i as f64);
        }
        Ok(FracKernel { mu, rgamma: r })
    }

    pub fn order(&self) -> f64 {
        self.mu
    }

    /// `omega_{mu+i}(x)` with the cached `1/Gamma(mu+i)`; `0` for `x <= 0`
    /// unless `mu + i == 1` is reached from the right.
    #[inline]
    fn shifted(&self, i: usize, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let order = self.mu + i as f64;
        if order == 1.0 {
            return 1.0;
        }
        x.powf(order - 1.0) * self.rgamma[i]
    }

    /// Moments `w_j`, `j = 0..=degree`, of the kernel centred at `t` against
    /// the Legendre basis of `[a, b]`, integrating over `[a, min(b, t)]`.
    pub fn interval_weights(&self, a: f64, b: f64, t: f64, degree: usize, out: &mut [f64]) {
        debug_assert!(t >= a && b > a && degree <= MAX_DEGREE);
        let k = b - a;
        let out = &mut out[..=degree];
        if t <= b || t - b < 0.5 * k {
            self.near_field(a, b, t, degree, out);
        } else {
            self.far_field(a, b, t, degree, out);
        }
    }

    fn near_field(&self, a: f64, b: f64, t: f64, degree: usize, out: &mut [f64]) {
        let scale = 2.0 / (b - a);
        let ta = t - a;
        let tb = t - b; // <= 0 when t is inside the interval
        // omega_{mu+1+i} at both ends needs Gamma(mu+1+i): shift index by one
        let mut left = [0.0; MAX_DEGREE + 1];
        let mut right = [0.0; MAX_DEGREE + 1];
        for i in 0..=degree {
            left[i] = self.shifted(i + 1, ta);
            right[i] = self.shifted(i + 1, tb);
        }
        for (j, w) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            let mut sc = 1.0;
            for i in 0..=j {
                let dl = legendre_endpoint_derivative(j, i, false);
                let dr = legendre_endpoint_derivative(j, i, true);
                acc += sc * (left[i] * dl - right[i] * dr);
                sc *= scale;
            }
            *w = acc;
        }
    }

    fn far_field(&self, a: f64, b: f64, t: f64, degree: usize, out: &mut [f64]) {
        let half = 0.5 * (b - a);
        let dist = t - 0.5 * (a + b);
        let rho = half / dist;
        let pre = half * self.shifted(0, dist);
        let e = self.mu - 1.0;
        out.iter_mut().for_each(|w| *w = 0.0);
        // coef_m = C(mu-1, m) (-rho)^m
        let mut coef = 1.0;
        for m in 0..400usize {
            if m > 0 {
                coef *= (e - (m - 1) as f64) / m as f64 * (-rho);
            }
            let mf = m as f64;
            let even = m % 2 == 0;
            for (j, w) in out.iter_mut().enumerate() {
                let tm = match (j, even) {
                    (0, true) => 2.0 / (mf + 1.0),
                    (1, false) => 2.0 / (mf + 2.0),
                    (2, true) => 2.0 * mf / ((mf + 1.0) * (mf + 3.0)),
                    (3, false) => (2.0 * mf - 2.0) / ((mf + 2.0) * (mf + 4.0)),
                    _ => 0.0,
                };
                *w += coef * tm;
            }
            if m > degree + 1 && (coef == 0.0 || coef.abs() < 1e-18 * out[0].abs().max(1e-300)) {
                break;
            }
        }
        out.iter_mut().for_each(|w| *w *= pre);
    }

    /// Moments of the forward kernel `omega_mu(s - c)` over `[a, b]`,
    /// `c <= a`: `int_a^b omega_mu(s - c) P_j(tau(s)) ds`.
    pub fn reflected_weights(&self, a: f64, b: f64, c: f64, degree: usize, out: &mut [f64]) {
        self.interval_weights(-b, -a, -c, degree, out);
        for (j, w) in out.iter_mut().enumerate().take(degree + 1) {
            if j % 2 == 1 {
                *w = -*w;
            }
        }
    }

    /// `(I^mu phi)(t)` accumulated into `out` (which is not cleared).
    pub fn accumulate(&self, phi: &PiecewiseTrajectory, t: f64, out: &mut [f64]) {
        let mut w = [0.0; MAX_DEGREE + 1];
        for n in 0..phi.num_intervals() {
            let (a, b) = phi.interval(n);
            if a >= t {
                break;
            }
            let p = phi.degree(n);
            self.interval_weights(a, b, t, p, &mut w);
            for (j, wj) in w.iter().enumerate().take(p + 1) {
                for (o, c) in out.iter_mut().zip(phi.coefficient(n, j)) {
                    *o += wj * c;
                }
            }
        }
    }
}

/// `(I^mu phi)(t) = int_0^t omega_mu(t - s) phi(s) ds`, exact for
/// piecewise-polynomial `phi`; `I^0 phi = phi` (left limit at breakpoints).
pub fn frac_integral_eval(phi: &PiecewiseTrajectory, mu: f64, t: f64) -> Result<Vec<f64>> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return domain(format!("fractional order must be >= 0, got {mu}"));
    }
    let (t0, tn) = (phi.breakpoints()[0], phi.final_time());
    if !(t >= t0 && t <= tn) {
        return domain(format!("time {t} outside [{t0}, {tn}]"));
    }
    if mu == 0.0 {
        return phi.eval(t);
    }
    let mut out = vec![0.0; phi.dim()];
    FracKernel::new(mu)?.accumulate(phi, t, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_graded, GaussRule};

    fn brute_force_weight(mu: f64, a: f64, b: f64, t: f64, j: usize) -> f64 {
        // graded Gauss towards the kernel singularity at s = t
        let rule = GaussRule::new(20);
        let upper = b.min(t);
        let f = |sigma: f64| {
            let s = t - sigma;
            let tau = (2.0 * s - a - b) / (b - a);
            let mut leg = [0.0; 4];
            crate::fracops::trajectory::legendre_values(tau, 3, &mut leg);
            omega_pos(mu, sigma) * leg[j]
        };
        integrate_graded(&rule, t - upper, t - a, 200, f)
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(1.0, 7.3).unwrap(), 1.0);
        assert!((omega(2.0, 3.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((omega(0.5, 4.0).unwrap() - 0.282_094_791_773_878_14).abs() < 1e-15);
        assert!(omega(0.5, 0.0).is_err());
        assert!(omega(0.0, 1.0).is_err());
    }

    #[test]
    fn weights_match_quadrature_in_all_regimes() {
        let cases = [
            (0.5, 0.0, 1.0, 0.4),   // inside
            (0.5, 0.0, 1.0, 1.0),   // right end
            (0.3, 1.0, 1.5, 2.1),   // near
            (0.7, 1.0, 1.5, 9.0),   // far
            (1.5, 2.0, 2.25, 40.0), // far, mu > 1
            (1.0, 0.0, 2.0, 5.0),
            (2.0, 0.5, 1.0, 0.8),
        ];
        for &(mu, a, b, t) in &cases {
            let ker = FracKernel::new(mu).unwrap();
            let mut w = [0.0; 4];
            ker.interval_weights(a, b, t, 3, &mut w);
            for j in 0..4 {
                let bf = brute_force_weight(mu, a, b, t, j);
                assert!((w[j] - bf).abs() < 1e-12 * (1.0 + bf.abs()), "mu={mu} [{a},{b}] t={t} j={j}: {} vs {bf}", w[j]);
            }
        }
    }

    #[test]
    fn near_and_far_regimes_agree_at_the_switch() {
        for &mu in &[0.25, 0.5, 0.9, 1.3] {
            let ker = FracKernel::new(mu).unwrap();
            let (a, b) = (1.0, 2.0);
            let t = b + 0.5;
            let mut near = [0.0; 4];
            let mut far = [0.0; 4];
            ker.near_field(a, b, t, 3, &mut near);
            ker.far_field(a, b, t, 3, &mut far);
            for j in 0..4 {
                assert!((near[j] - far[j]).abs() < 2e-13, "mu={mu} j={j}: {} vs {}", near[j], far[j]);
            }
        }
    }

    #[test]
    fn constant_trajectory_integrates_to_shifted_kernel() {
        let phi = PiecewiseTrajectory::constant(vec![0.0, 0.3, 0.5, 1.0], &[1.0]).unwrap();
        let v = frac_integral_eval(&phi, 0.5, 1.0).unwrap()[0];
        assert!((v - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-14);
        for &t in &[0.1, 0.3, 0.77] {
            let v = frac_integral_eval(&phi, 0.8, t).unwrap()[0];
            assert!((v - omega_pos(1.8, t)).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_ramp_first_integral() {
        let phi = PiecewiseTrajectory::continuous_linear(vec![0.0, 2.0], &[vec![0.0], vec![2.0]]).unwrap();
        assert!((frac_integral_eval(&phi, 1.0, 2.0).unwrap()[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn order_zero_is_identity_and_bad_times_rejected() {
        let phi = PiecewiseTrajectory::new(vec![0.0, 1.0, 2.0], vec![1, 0], vec![1.0, 1.0, 5.0], 1).unwrap();
        assert_eq!(frac_integral_eval(&phi, 0.0, 1.0).unwrap(), vec![2.0]);
        assert_eq!(frac_integral_eval(&phi, 0.0, 1.5).unwrap(), vec![5.0]);
        assert!(frac_integral_eval(&phi, 0.5, 2.5).is_err());
        assert!(frac_integral_eval(&phi, -0.1, 1.0).is_err());
    }

    #[test]
    fn reflected_weights_match_quadrature() {
        let ker = FracKernel::new(0.4).unwrap();
        let mut w = [0.0; 4];
        for &c in &[1.0, 0.7, -3.0] {
            ker.reflected_weights(1.0, 1.4, c, 3, &mut w);
            for j in 0..4 {
                let rule = GaussRule::new(20);
                let f = |x: f64| {
                    let s = c + x;
                    let tau = (2.0 * s - 2.4) / 0.4;
                    let mut leg = [0.0; 4];
                    crate::fracops::trajectory::legendre_values(tau, 3, &mut leg);
                    omega_pos(0.4, x) * leg[j]
                };
                let bf = integrate_graded(&rule, 1.0 - c, 1.4 - c, 200, f);
                assert!((w[j] - bf).abs() < 1e-12, "c={c} j={j}: {} vs {bf}", w[j]);
            }
        }
    }
}
