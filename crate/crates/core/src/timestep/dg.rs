//! Discontinuous Galerkin time stepping of degree 0 or 1 for fractional
//! diffusion.
//!
//! On `I_n` write `U = x_0 + x_1 tau` with `tau` the local coordinate. Testing
//! with `chi` and `tau chi` and integrating the memory term by parts gives
//!
//! ```text
//! M (x_0 + x_1) + A [J(t_n) - J(t_{n-1})]                         =  M U^{n-1}_- + G_0
//! M (x_1 - x_0) + A [J(t_n) + J(t_{n-1}) - 2/k (K(t_n) - K(t_{n-1}))] = -M U^{n-1}_- + G_1
//! ```
//!
//! with `J = I^alpha U`, `K = I^{alpha+1} U`, `G_i = int_{I_n} <g, P_i chi>`.
//! `J(t_n)` and `K(t_n)` split into the history of earlier intervals and the
//! exact kernel weights of `I_n` applied to `x_0, x_1`.

use super::config::SchemeConfig;
use super::solution::DiscreteSolution;
use crate::error::{config, Error, Result};
use crate::fem1d::{assemble_mass, assemble_stiffness, load_vector, BandMatrix, BandedOperator, FeSpace};
use crate::fem1d::CoefficientField;
use crate::fracops::{FracKernel, PiecewiseTrajectory};
use crate::quadrature::GaussRule;

/// Adds `sum_{l < upto} sum_j w_j(l, t) c_{l,j}` to `out`, for uniform degree.
pub(crate) fn add_history(
    ker: &FracKernel,
    times: &[f64],
    coeffs: &[f64],
    degree: usize,
    m: usize,
    upto: usize,
    t: f64,
    out: &mut [f64],
) {
    let nb = degree + 1;
    let mut w = [0.0; 4];
    for l in 0..upto {
        ker.interval_weights(times[l], times[l + 1], t, degree, &mut w);
        let block = &coeffs[l * nb * m..(l + 1) * nb * m];
        for (j, wj) in w.iter().enumerate().take(nb) {
            for (o, c) in out.iter_mut().zip(&block[j * m..(j + 1) * m]) {
                *o += wj * c;
            }
        }
    }
}

/// `int_a^b <g(t), P_i(tau) chi> dt` for `i <= degree`, 4-point Gauss in time.
pub(crate) fn source_moments(
    space: &FeSpace,
    coeffs: &CoefficientField,
    a: f64,
    b: f64,
    degree: usize,
) -> Vec<Vec<f64>> {
    let m = space.dofs();
    let mut out = vec![vec![0.0; m]; degree + 1];
    if !coeffs.has_source() {
        return out;
    }
    let rule = GaussRule::new(4);
    for (t, w) in rule.mapped(a, b) {
        let load = load_vector(space, |x| coeffs.source(x, t));
        let tau = (2.0 * t - a - b) / (b - a);
        for (i, o) in out.iter_mut().enumerate() {
            let f = w * if i == 0 { 1.0 } else { tau };
            for (v, l) in o.iter_mut().zip(&load) {
                *v += f * l;
            }
        }
    }
    out
}

fn add_band_block(band: &mut BandMatrix, op: &BandedOperator, s: f64, extra: Option<(&BandedOperator, f64)>, r: usize, c: usize) {
    let m = op.dim();
    for i in 0..m {
        for j in i.saturating_sub(1)..=(i + 1).min(m - 1) {
            let mut v = s * op.get(i, j);
            if let Some((o, f)) = extra {
                v += f * o.get(i, j);
            }
            if v != 0.0 {
                band.add(2 * i + r, 2 * j + c, v);
            }
        }
    }
}

/// DG(p), `p` in `{0, 1}`, for `u_t + d_t^{1-alpha} A u = g` (no forcing).
pub fn dg_solve_diffusion(cfg: &SchemeConfig) -> Result<DiscreteSolution> {
    cfg.validate()?;
    if cfg.coeffs.has_forcing() {
        return config("the DG stepper handles F = 0 only; use solve_general_f");
    }
    let space = &cfg.space;
    let m = space.dofs();
    let mass = assemble_mass(space);
    let stiff = assemble_stiffness(space, &cfg.coeffs)?;
    let u0x = cfg.initial_vector()?;
    let times = cfg.partition.points();
    let nsteps = cfg.partition.steps();
    let p = cfg.degree;
    let nb = p + 1;
    let alpha = cfg.alpha;
    let ka = FracKernel::new(alpha)?;
    let kb = FracKernel::new(alpha + 1.0)?;

    let mut coeffs = vec![0.0; nsteps * nb * m];
    let mut frac = Vec::with_capacity(nsteps + 1);
    let mut frac1 = Vec::with_capacity(nsteps + 1);
    frac.push(vec![0.0; m]);
    frac1.push(vec![0.0; m]);
    let mut u_prev = u0x.clone();
    let mut hist = vec![0.0; m];
    let mut hist1 = vec![0.0; m];
    let mut tmp = vec![0.0; m];

    for n in 1..=nsteps {
        let (a, b) = (times[n - 1], times[n]);
        let k = b - a;
        hist.iter_mut().for_each(|v| *v = 0.0);
        add_history(&ka, &times, &coeffs, p, m, n - 1, b, &mut hist);
        hist1.iter_mut().for_each(|v| *v = 0.0);
        add_history(&kb, &times, &coeffs, p, m, n - 1, b, &mut hist1);
        let mut w = [0.0; 4];
        let mut v = [0.0; 4];
        ka.interval_weights(a, b, b, p, &mut w);
        kb.interval_weights(a, b, b, p, &mut v);
        let g = source_moments(space, &cfg.coeffs, a, b, p);
        let (jp, kp) = (&frac[n - 1], &frac1[n - 1]);

        // row 0 right-hand side: M U_prev + G0 - A (H - J_{n-1})
        let mut r0 = mass.apply(&u_prev);
        for i in 0..m {
            tmp[i] = hist[i] - jp[i];
            r0[i] += g[0][i];
        }
        stiff.apply_add(-1.0, &tmp, &mut r0);

        let mut block = vec![0.0; nb * m];
        if p == 0 {
            let op = BandedOperator::combine(1.0, &mass, w[0], &stiff);
            let chol = op.cholesky().map_err(|e| Error::Singular { step: n, detail: e.to_string() })?;
            chol.solve_in_place(&mut r0);
            block.copy_from_slice(&r0);
        } else {
            // row 1: -M U_prev + G1 - A (H + J_{n-1} - 2/k (H1 - K_{n-1}))
            let mut r1 = mass.apply(&u_prev);
            for i in 0..m {
                r1[i] = -r1[i] + g[1][i];
                tmp[i] = hist[i] + jp[i] - 2.0 / k * (hist1[i] - kp[i]);
            }
            stiff.apply_add(-1.0, &tmp, &mut r1);

            let mut band = BandMatrix::zeros(2 * m, 3, 3);
            let c0 = w[0] - 2.0 / k * v[0];
            let c1 = w[1] - 2.0 / k * v[1];
            add_band_block(&mut band, &mass, 1.0, Some((&stiff, w[0])), 0, 0);
            add_band_block(&mut band, &mass, 1.0, Some((&stiff, w[1])), 0, 1);
            add_band_block(&mut band, &mass, -1.0, Some((&stiff, c0)), 1, 0);
            add_band_block(&mut band, &mass, 1.0, Some((&stiff, c1)), 1, 1);
            let mut rhs: Vec<f64> = (0..2 * m).map(|q| if q % 2 == 0 { r0[q / 2] } else { r1[q / 2] }).collect();
            band.factor(n)?.solve_in_place(&mut rhs);
            for i in 0..m {
                block[i] = rhs[2 * i];
                block[m + i] = rhs[2 * i + 1];
            }
        }

        coeffs[(n - 1) * nb * m..n * nb * m].copy_from_slice(&block);
        let mut jn = hist.clone();
        let mut kn = hist1.clone();
        for j in 0..nb {
            let x = &block[j * m..(j + 1) * m];
            for i in 0..m {
                jn[i] += w[j] * x[i];
                kn[i] += v[j] * x[i];
            }
        }
        frac.push(jn);
        frac1.push(kn);
        u_prev = (0..m).map(|i| (0..nb).map(|j| block[j * m + i]).sum()).collect();
    }

    let trajectory = PiecewiseTrajectory::new(times, vec![p; nsteps], coeffs, m)?;
    Ok(DiscreteSolution { alpha, trajectory, initial: u0x, frac, frac1 })
}
