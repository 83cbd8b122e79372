use crate::error::{domain, Result};
use crate::fracops::{FracKernel, PiecewiseTrajectory};
use crate::quadrature::{integrate_graded, GaussRule};

/// Largest accepted growth of the ratio from one refinement level to the next.
pub const PROBE_GROWTH: f64 = 1.1;

const LEVELS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ProbeRow {
    pub level: usize,
    pub intervals: usize,
    pub b1_sq: f64,
    pub frac_sq: f64,
    /// `int ||B_1 phi||^2 / int ||I^alpha phi||^2`, `0` when both vanish.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ProbeReport {
    pub alpha: f64,
    pub rows: Vec<ProbeRow>,
    pub max_ratio: f64,
    /// `ratio_{k+1} <= 1.1 ratio_k` for every `k >= 2`.
    pub bounded: bool,
}

/// `B_1 phi(t) = F(t) (I^alpha phi)(t) - int_0^t F'(s) (I^alpha phi)(s) ds` at
/// sorted times `ts`, with the inner integral by 4-point Gauss on each
/// interval of `phi` (as in `operator_b1` for a field constant in space).
fn b1_at(
    phi: &PiecewiseTrajectory,
    ker: &FracKernel,
    field: &dyn Fn(f64) -> f64,
    field_dt: &dyn Fn(f64) -> f64,
    ts: &[f64],
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let d = phi.dim();
    let rule = GaussRule::new(4);
    let frac = |s: f64| {
        let mut v = vec![0.0; d];
        ker.accumulate(phi, s, &mut v);
        v
    };
    let partial = |a: f64, b: f64| {
        let mut acc = vec![0.0; d];
        for (s, w) in rule.mapped(a, b) {
            let f = field_dt(s);
            for (o, v) in acc.iter_mut().zip(frac(s)) {
                *o += w * f * v;
            }
        }
        acc
    };
    let mut done = vec![0.0; d];
    let mut n_done = 0;
    ts.iter()
        .map(|&t| {
            while n_done < phi.num_intervals() && phi.interval(n_done).1 <= t {
                let (a, b) = phi.interval(n_done);
                for (o, v) in done.iter_mut().zip(partial(a, b)) {
                    *o += v;
                }
                n_done += 1;
            }
            let mut inner = done.clone();
            if n_done < phi.num_intervals() {
                let a = phi.interval(n_done).0;
                if t > a {
                    for (o, v) in inner.iter_mut().zip(partial(a, t)) {
                        *o += v;
                    }
                }
            }
            let j = frac(t);
            let f = field(t);
            let b1 = j.iter().zip(&inner).map(|(x, i)| f * x - i).collect();
            (b1, j)
        })
        .collect()
}

/// Measures `int_0^T ||B_1 phi||^2 / int_0^T ||I^alpha phi||^2` over a family
/// of trajectories, ordered by refinement level. `F` is constant in space.
pub fn b_operator_ratio_probe(
    family: &[PiecewiseTrajectory],
    field: &dyn Fn(f64) -> f64,
    field_dt: &dyn Fn(f64) -> f64,
    alpha: f64,
) -> Result<ProbeReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha = {alpha} outside (0, 1]"));
    }
    if family.is_empty() {
        return domain("empty trajectory family");
    }
    let ker = FracKernel::new(alpha)?;
    let rule = GaussRule::new(4);
    let mut rows = Vec::with_capacity(family.len());
    for (level, phi) in family.iter().enumerate() {
        // outer nodes: graded Gauss on every interval, collected in order
        let mut nodes = Vec::new();
        for n in 0..phi.num_intervals() {
            let (a, b) = phi.interval(n);
            integrate_graded(&rule, a, b, LEVELS, |s| {
                nodes.push(s);
                0.0
            });
        }
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&i, &j| nodes[i].total_cmp(&nodes[j]));
        let sorted: Vec<f64> = order.iter().map(|&i| nodes[i]).collect();
        let values = b1_at(phi, &ker, field, field_dt, &sorted);
        let mut sq = vec![(0.0, 0.0); nodes.len()];
        for (k, &i) in order.iter().enumerate() {
            let (b1, j) = &values[k];
            sq[i] = (b1.iter().map(|v| v * v).sum::<f64>(), j.iter().map(|v| v * v).sum::<f64>());
        }
        // replay the same quadrature with the stored values
        let (mut b1_sq, mut frac_sq) = (0.0, 0.0);
        let mut idx = 0;
        for n in 0..phi.num_intervals() {
            let (a, b) = phi.interval(n);
            b1_sq += integrate_graded(&rule, a, b, LEVELS, |_| {
                idx += 1;
                sq[idx - 1].0
            });
        }
        idx = 0;
        for n in 0..phi.num_intervals() {
            let (a, b) = phi.interval(n);
            frac_sq += integrate_graded(&rule, a, b, LEVELS, |_| {
                idx += 1;
                sq[idx - 1].1
            });
        }
        let ratio = if frac_sq > 0.0 { b1_sq / frac_sq } else { 0.0 };
        rows.push(ProbeRow { level, intervals: phi.num_intervals(), b1_sq, frac_sq, ratio });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let bounded = rows.windows(2).skip(2).all(|w| w[1].ratio <= PROBE_GROWTH * w[0].ratio);
    Ok(ProbeReport { alpha, rows, max_ratio, bounded })
}

/// Interpolants of `f` of the given degree on `2^k` uniform intervals of
/// `[0, T]`, `k = 0..levels`.
pub fn refinement_family<F: Fn(f64) -> f64>(
    f: F,
    final_time: f64,
    levels: usize,
    degree: usize,
) -> Result<Vec<PiecewiseTrajectory>> {
    (0..levels)
        .map(|k| {
            let n = 1usize << k;
            let bp = (0..=n).map(|i| final_time * i as f64 / n as f64).collect();
            PiecewiseTrajectory::interpolate_scalar(bp, degree, &f)
        })
        .collect()
}
