//! Randomized checks of inequalities for fractional integrals.
//!
//! Each check draws piecewise-polynomial trajectories and parameters within
//! the hypotheses and records the signed relative slack `(rhs - lhs) / scale`.
//! Integrands involving `I^mu phi` are only Hoelder continuous at the
//! breakpoints, so those integrals use Gauss rules graded towards both ends of
//! every interval.

use crate::error::{domain, Result};
use crate::fracops::{gamma, history_inner_integral, omega_pos, Euclidean, FracKernel, PiecewiseTrajectory};
use crate::quadrature::{integrate_adaptive, integrate_graded, GaussRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const LEMMA_TOL: f64 = 1e-9;
pub const COMMUTATOR_TOL: f64 = 1e-10;

const LEVELS: u32 = 30;

fn graded<F: Fn(f64) -> f64>(rule: &GaussRule, a: f64, b: f64, f: F) -> f64 {
    let m = 0.5 * (a + b);
    integrate_graded(rule, a, m, LEVELS, &f) + integrate_graded(rule, 0.0, b - m, LEVELS, |r| f(b - r))
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// `int_0^t f(s, (I^mu phi)(s)) ds`, with `I^0 phi = phi`.
fn integrate_with_frac<F: Fn(f64, &[f64]) -> f64>(phi: &PiecewiseTrajectory, mu: f64, t: f64, f: F) -> Result<f64> {
    let rule = GaussRule::new(8);
    let ker = if mu > 0.0 { Some(FracKernel::new(mu)?) } else { None };
    let mut total = 0.0;
    for n in 0..phi.num_intervals() {
        let (a, b) = phi.interval(n);
        if a >= t {
            break;
        }
        let e = b.min(t);
        total += graded(&rule, a, e, |s| {
            let v = match &ker {
                Some(k) => {
                    let mut v = vec![0.0; phi.dim()];
                    k.accumulate(phi, s, &mut v);
                    v
                }
                None => {
                    let mut v = vec![0.0; phi.dim()];
                    phi.eval_local(n, phi.local_coordinate(n, s), &mut v);
                    v
                }
            };
            f(s, &v)
        });
    }
    Ok(total)
}

fn check_time(phi: &PiecewiseTrajectory, t: f64) -> Result<()> {
    if !(t > 0.0 && t <= phi.final_time()) {
        return domain(format!("time {t} outside (0, {}]", phi.final_time()));
    }
    Ok(())
}

/// `(int_0^t ||I^nu phi||^2, 2 t^{2(nu-mu)} int_0^t ||I^mu phi||^2)` for `0 <= mu <= nu <= 1`.
pub fn i_nu_i_mu_sides(phi: &PiecewiseTrajectory, mu: f64, nu: f64, t: f64) -> Result<(f64, f64)> {
    if !(0.0 <= mu && mu <= nu && nu <= 1.0) {
        return domain(format!("need 0 <= mu <= nu <= 1, got mu = {mu}, nu = {nu}"));
    }
    check_time(phi, t)?;
    let lhs = integrate_with_frac(phi, nu, t, |_, v| sq(v))?;
    let rhs = 2.0 * t.powf(2.0 * (nu - mu)) * integrate_with_frac(phi, mu, t, |_, v| sq(v))?;
    Ok((lhs, rhs))
}

/// `(int_0^t ||I^mu phi||^2, 2 int_0^t omega_mu(t-s) int_0^s <phi, I^mu phi> dq ds)` for
/// `0 < mu <= 1`; the right side is evaluated as `2 int_0^t omega_{mu+1}(t-q) <phi, I^mu phi>(q) dq`.
pub fn i_mu_y_sides(phi: &PiecewiseTrajectory, mu: f64, t: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0 && mu <= 1.0) {
        return domain(format!("need 0 < mu <= 1, got {mu}"));
    }
    check_time(phi, t)?;
    let lhs = integrate_with_frac(phi, mu, t, |_, v| sq(v))?;
    let rhs = 2.0
        * integrate_with_frac(phi, mu, t, |s, v| {
            let n = phi.interval_of(s).unwrap_or(0);
            let mut p = vec![0.0; phi.dim()];
            phi.eval_local(n, phi.local_coordinate(n, s), &mut p);
            omega_pos(mu + 1.0, t - s) * p.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
        })?;
    Ok((lhs, rhs))
}

/// `(||phi(t)||^2, 2 omega_{2-nu}(t) int_0^t <phi', I^nu phi'>)` for continuous
/// `phi` with `phi(0) = 0` and `0 < nu <= 1`.
pub fn phi_t_sides(phi: &PiecewiseTrajectory, nu: f64, t: f64) -> Result<(f64, f64)> {
    if !(nu > 0.0 && nu <= 1.0) {
        return domain(format!("need 0 < nu <= 1, got {nu}"));
    }
    check_time(phi, t)?;
    let scale = phi.scale().max(f64::MIN_POSITIVE);
    if sq(&phi.right_limit(0)).sqrt() > 1e-12 * scale || !phi.is_continuous(1e-12 * scale) {
        return domain("phi must be continuous with phi(0) = 0");
    }
    let lhs = sq(&phi.eval(t)?);
    let rhs = 2.0 * omega_pos(2.0 - nu, t) * history_inner_integral(&phi.derivative(), nu, t, &Euclidean)?;
    Ok((lhs, rhs))
}

/// `((int ||g||)^2 + t^{-1} int ||s g||^2, (1 + 1/eta) t^eta int s^{1-eta} ||g||^2)` over `(0, t)`.
pub fn g_alternative_sides(g: &PiecewiseTrajectory, eta: f64, t: f64) -> Result<(f64, f64)> {
    if !(eta > 0.0 && eta <= 1.0) {
        return domain(format!("need 0 < eta <= 1, got {eta}"));
    }
    check_time(g, t)?;
    let rule = GaussRule::new(8);
    let (mut l1, mut wsq, mut rhs_int) = (0.0, 0.0, 0.0);
    for n in 0..g.num_intervals() {
        let (a, b) = g.interval(n);
        if a >= t {
            break;
        }
        let e = b.min(t);
        let at = |s: f64| {
            let mut v = vec![0.0; g.dim()];
            g.eval_local(n, g.local_coordinate(n, s), &mut v);
            sq(&v)
        };
        let rough = rule.integrate(a, e, |s| at(s).sqrt());
        l1 += integrate_adaptive(|s| at(s).sqrt(), a, e, 1e-15 * rough.max(1e-300), 4000);
        wsq += rule.integrate(a, e, |s| s * s * at(s));
        rhs_int += graded(&rule, a, e, |s| s.powf(1.0 - eta) * at(s));
    }
    let lhs = l1 * l1 + wsq / t;
    let rhs = (1.0 + 1.0 / eta) * t.powf(eta) * rhs_int;
    Ok((lhs, rhs))
}

/// Residual of `t (I^alpha phi)(t) - I^alpha(s phi)(t) - alpha (I^{alpha+1} phi)(t)`
/// (max norm) and the largest of the three terms.
pub fn commutator_residual(phi: &PiecewiseTrajectory, alpha: f64, t: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha = {alpha} outside (0, 1]"));
    }
    check_time(phi, t)?;
    let d = phi.dim();
    let mphi = phi.times_t()?;
    let (mut a, mut b, mut c) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    FracKernel::new(alpha)?.accumulate(phi, t, &mut a);
    FracKernel::new(alpha)?.accumulate(&mphi, t, &mut b);
    FracKernel::new(alpha + 1.0)?.accumulate(phi, t, &mut c);
    let mut res: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..d {
        let (x, y, z) = (t * a[i], b[i], alpha * c[i]);
        res = res.max((x - y - z).abs());
        scale = scale.max(x.abs()).max(y.abs()).max(z.abs());
    }
    Ok((res, scale))
}

/// `(int_0^t <phi, I^mu phi>, ||phi||^2_{L2(0,t)} t^mu / Gamma(mu + 1))`; the
/// second value bounds the magnitude of the first.
pub fn positivity_sides(phi: &PiecewiseTrajectory, mu: f64, t: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0 && mu < 1.0) {
        return domain(format!("need 0 < mu < 1, got {mu}"));
    }
    check_time(phi, t)?;
    let value = history_inner_integral(phi, mu, t, &Euclidean)?;
    let l2 = integrate_with_frac(phi, 0.0, t, |_, v| sq(v))?;
    Ok((value, l2 * t.powf(mu) / gamma(mu + 1.0)))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub trials: usize,
    pub tolerance: f64,
    /// `min (rhs - lhs) / scale`; for the commutator `-max residual / scale`.
    pub worst_relative_slack: f64,
    pub worst_trial: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<LemmaCheck>,
    pub passed: bool,
}

fn relative(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (rhs - lhs) / scale
    }
}

fn random_breakpoints(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let k = rng.gen_range(1..=5);
    let total = rng.gen_range(0.5..2.0);
    let inc: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
    let sum: f64 = inc.iter().sum();
    let mut bp = vec![0.0];
    let mut acc = 0.0;
    for (i, v) in inc.iter().enumerate() {
        acc += v;
        bp.push(if i + 1 == k { total } else { total * acc / sum });
    }
    bp
}

/// Random piecewise polynomial of degree at most `max_degree`, dimension 1 to 3.
pub fn random_trajectory(rng: &mut ChaCha8Rng, max_degree: usize) -> PiecewiseTrajectory {
    let bp = random_breakpoints(rng);
    let dim = rng.gen_range(1..=3);
    let n = bp.len() - 1;
    let degrees: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=max_degree)).collect();
    let mut coeffs = Vec::new();
    for &p in &degrees {
        for j in 0..=p {
            for _ in 0..dim {
                coeffs.push(rng.gen_range(-1.0..1.0) / (j + 1) as f64);
            }
        }
    }
    PiecewiseTrajectory::new(bp, degrees, coeffs, dim).expect("valid random trajectory")
}

/// Random continuous piecewise quadratic with `phi(0) = 0`.
pub fn random_continuous(rng: &mut ChaCha8Rng) -> PiecewiseTrajectory {
    let bp = random_breakpoints(rng);
    let dim = rng.gen_range(1..=3);
    let nodal: Vec<Vec<f64>> = (0..bp.len())
        .map(|k| (0..dim).map(|_| if k == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) }).collect())
        .collect();
    let lin = PiecewiseTrajectory::continuous_linear(bp.clone(), &nodal).expect("valid nodal data");
    let n = bp.len() - 1;
    let mut coeffs = Vec::with_capacity(3 * dim * n);
    for l in 0..n {
        // P_2 - P_0 vanishes at both ends of the interval
        let bubble: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
        coeffs.extend(lin.coefficient(l, 0).iter().zip(&bubble).map(|(c, b)| c - b));
        coeffs.extend_from_slice(lin.coefficient(l, 1));
        coeffs.extend(bubble);
    }
    PiecewiseTrajectory::new(bp, vec![2; n], coeffs, dim).expect("valid continuous trajectory")
}

#[derive(Debug, Clone)]
enum Trial {
    Commutator(PiecewiseTrajectory, f64, f64),
    Positivity(PiecewiseTrajectory, f64, f64),
    INuIMu(PiecewiseTrajectory, f64, f64, f64),
    IMuY(PiecewiseTrajectory, f64, f64),
    PhiT(PiecewiseTrajectory, f64, f64),
    GAlternative(PiecewiseTrajectory, f64, f64),
}

const NAMES: [&str; 6] = ["commutator", "positivity", "i-nu-i-mu", "i-mu-y", "phi-t", "g-alternative"];

fn draw(rng: &mut ChaCha8Rng, kind: usize) -> Trial {
    let phi = if kind == 4 { random_continuous(rng) } else { random_trajectory(rng, 2) };
    let t = phi.final_time() * rng.gen_range(0.05..=1.0);
    let order = |rng: &mut ChaCha8Rng| rng.gen_range(0.05..=1.0);
    match kind {
        0 => Trial::Commutator(phi, order(rng), t),
        1 => Trial::Positivity(phi, rng.gen_range(0.05..0.95), t),
        2 => {
            let (a, b) = (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0));
            Trial::INuIMu(phi, f64::min(a, b), f64::max(a, b), t)
        }
        3 => Trial::IMuY(phi, order(rng), t),
        4 => Trial::PhiT(phi, order(rng), t),
        _ => Trial::GAlternative(phi, order(rng), t),
    }
}

fn evaluate(trial: &Trial) -> Result<f64> {
    Ok(match trial {
        Trial::Commutator(p, a, t) => {
            let (res, scale) = commutator_residual(p, *a, *t)?;
            if scale == 0.0 {
                0.0
            } else {
                -res / scale
            }
        }
        Trial::Positivity(p, mu, t) => {
            let (v, bound) = positivity_sides(p, *mu, *t)?;
            if bound == 0.0 {
                0.0
            } else {
                v / bound
            }
        }
        Trial::INuIMu(p, mu, nu, t) => {
            let (l, r) = i_nu_i_mu_sides(p, *mu, *nu, *t)?;
            relative(l, r)
        }
        Trial::IMuY(p, mu, t) => {
            let (l, r) = i_mu_y_sides(p, *mu, *t)?;
            relative(l, r)
        }
        Trial::PhiT(p, nu, t) => {
            let (l, r) = phi_t_sides(p, *nu, *t)?;
            relative(l, r)
        }
        Trial::GAlternative(g, eta, t) => {
            let (l, r) = g_alternative_sides(g, *eta, *t)?;
            relative(l, r)
        }
    })
}

/// Runs `trials` random instances of each check. Inputs are drawn
/// sequentially from one seeded stream, so the report depends only on
/// `(seed, trials)`.
pub fn lemma_property_suite(seed: u64, trials: usize) -> Result<LemmaReport> {
    if trials == 0 {
        return domain("trials must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Trial> = (0..NAMES.len()).flat_map(|k| (0..trials).map(move |_| k)).map(|k| draw(&mut rng, k)).collect();
    let slacks: Vec<f64> = draws.par_iter().map(evaluate).collect::<Result<_>>()?;
    let checks: Vec<LemmaCheck> = NAMES
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let part = &slacks[k * trials..(k + 1) * trials];
            let (worst_trial, worst) = part
                .iter()
                .copied()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("trials >= 1");
            let tolerance = if k == 0 { COMMUTATOR_TOL } else { LEMMA_TOL };
            LemmaCheck {
                name: name.to_string(),
                trials,
                tolerance,
                worst_relative_slack: worst,
                worst_trial,
                passed: worst >= -tolerance,
            }
        })
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    Ok(LemmaReport { seed, trials, checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trajectory_gives_equality() {
        let z = PiecewiseTrajectory::constant(vec![0.0, 0.5, 1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(i_nu_i_mu_sides(&z, 0.3, 0.6, 1.0).unwrap(), (0.0, 0.0));
        assert_eq!(i_mu_y_sides(&z, 0.3, 1.0).unwrap(), (0.0, 0.0));
        assert_eq!(phi_t_sides(&z, 0.3, 1.0).unwrap(), (0.0, 0.0));
        assert_eq!(g_alternative_sides(&z, 0.3, 1.0).unwrap(), (0.0, 0.0));
        assert_eq!(commutator_residual(&z, 0.3, 1.0).unwrap(), (0.0, 0.0));
        assert_eq!(positivity_sides(&z, 0.3, 1.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn g_alternative_unit_example() {
        let one = PiecewiseTrajectory::constant(vec![0.0, 1.0], &[1.0]).unwrap();
        let (l, r) = g_alternative_sides(&one, 1.0, 1.0).unwrap();
        assert!((l - 4.0 / 3.0).abs() < 1e-13 && (r - 2.0).abs() < 1e-13);
    }

    #[test]
    fn constant_trajectory_closed_forms() {
        // phi = 1: I^mu phi = t^mu / Gamma(mu+1), int_0^1 (I^mu 1)^2 = 1 / ((2mu+1) Gamma(mu+1)^2)
        let one = PiecewiseTrajectory::constant(vec![0.0, 0.3, 1.0], &[1.0]).unwrap();
        let (mu, nu) = (0.25, 0.7);
        let f = |m: f64| 1.0 / ((2.0 * m + 1.0) * gamma(m + 1.0).powi(2));
        let (l, r) = i_nu_i_mu_sides(&one, mu, nu, 1.0).unwrap();
        assert!((l - f(nu)).abs() < 1e-12 && (r - 2.0 * f(mu)).abs() < 1e-12, "{l} {r}");
        // int_0^1 <1, I^mu 1> = 1 / Gamma(mu+2)
        let (v, _) = positivity_sides(&one, mu, 1.0).unwrap();
        assert!((v - 1.0 / gamma(mu + 2.0)).abs() < 1e-13);
        // 2 int_0^1 omega_{mu+1}(1-q) q^mu / Gamma(mu+1) dq = 2 / Gamma(2 mu + 2)
        let (_, r) = i_mu_y_sides(&one, mu, 1.0).unwrap();
        assert!((r - 2.0 / gamma(2.0 * mu + 2.0)).abs() < 1e-12, "{r}");
    }

    #[test]
    fn phi_t_requires_vanishing_start() {
        let one = PiecewiseTrajectory::constant(vec![0.0, 1.0], &[1.0]).unwrap();
        assert!(phi_t_sides(&one, 0.5, 1.0).is_err());
    }

    #[test]
    fn suite_passes_and_is_reproducible() {
        let a = lemma_property_suite(7, 12).unwrap();
        assert!(a.passed, "{a:#?}");
        assert_eq!(a, lemma_property_suite(7, 12).unwrap());
        assert!(lemma_property_suite(7, 0).is_err());
    }
}
