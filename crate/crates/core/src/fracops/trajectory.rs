use crate::error::{config, domain, Result};

/// Highest polynomial degree a trajectory interval may carry.
///
/// Degree 3 is one more than the solvers ever produce, so that `t * phi(t)`
/// of a quadratic trajectory is still representable.
pub const MAX_DEGREE: usize = 3;

/// Legendre polynomials `P_0..=P_degree` at `tau`.
pub fn legendre_values(tau: f64, degree: usize, out: &mut [f64]) {
    out[0] = 1.0;
    if degree >= 1 {
        out[1] = tau;
    }
    for j in 2..=degree {
        let jf = j as f64;
        out[j] = ((2.0 * jf - 1.0) * tau * out[j - 1] - (jf - 1.0) * out[j - 2]) / jf;
    }
}

/// `d^i P_j / dtau^i` at `tau = +1` (`right`) or `tau = -1`.
pub fn legendre_endpoint_derivative(j: usize, i: usize, right: bool) -> f64 {
    if i > j {
        return 0.0;
    }
    // (j+i)! / (2^i i! (j-i)!)
    let mut num = 1.0;
    for k in (j - i + 1)..=(j + i) {
        num *= k as f64;
    }
    let mut den = 1.0;
    for k in 1..=i {
        den *= 2.0 * k as f64;
    }
    let v = num / den;
    if right || (j - i) % 2 == 0 {
        v
    } else {
        -v
    }
}

/// A vector-valued function of time that is polynomial on each interval of
/// a partition `0 = t_0 < t_1 < ... < t_N`.
///
/// On interval `n` (between `t_{n-1}` and `t_n`, zero-based index `n-1`)
/// the function is `sum_j c_{n,j} P_j(tau)`, where `tau` maps the interval
/// affinely onto `[-1, 1]` and each `c_{n,j}` is a vector of length `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseTrajectory {
    breakpoints: Vec<f64>,
    degrees: Vec<usize>,
    offsets: Vec<usize>,
    coeffs: Vec<f64>,
    dim: usize,
}

impl PiecewiseTrajectory {
    /// `coeffs` holds the interval blocks back to back; block `n` has
    /// `(degrees[n] + 1) * dim` entries with coefficient `j` stored at
    /// `j * dim .. (j + 1) * dim`.
    pub fn new(breakpoints: Vec<f64>, degrees: Vec<usize>, coeffs: Vec<f64>, dim: usize) -> Result<Self> {
        if breakpoints.len() < 2 {
            return config("a trajectory needs at least one interval");
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) || !breakpoints.iter().all(|t| t.is_finite()) {
            return config("trajectory breakpoints must be finite and strictly increasing");
        }
        if degrees.len() != breakpoints.len() - 1 {
            return config(format!(
                "{} degrees given for {} intervals",
                degrees.len(),
                breakpoints.len() - 1
            ));
        }
        if let Some(&p) = degrees.iter().find(|&&p| p > MAX_DEGREE) {
            return config(format!("interval degree {p} exceeds the cap {MAX_DEGREE}"));
        }
        if dim == 0 {
            return config("trajectory dimension must be positive");
        }
        let mut offsets = Vec::with_capacity(degrees.len() + 1);
        let mut off = 0;
        for &p in &degrees {
            offsets.push(off);
            off += (p + 1) * dim;
        }
        offsets.push(off);
        if coeffs.len() != off {
            return config(format!("expected {off} coefficients, got {}", coeffs.len()));
        }
        Ok(PiecewiseTrajectory { breakpoints, degrees, offsets, coeffs, dim })
    }

    /// The constant function `value` on the given partition.
    pub fn constant(breakpoints: Vec<f64>, value: &[f64]) -> Result<Self> {
        let n = breakpoints.len().saturating_sub(1);
        let coeffs = value.iter().copied().cycle().take(n * value.len()).collect();
        Self::new(breakpoints, vec![0; n], coeffs, value.len())
    }

    /// Piecewise constant with `values[n]` on interval `n`.
    pub fn piecewise_constant(breakpoints: Vec<f64>, values: &[Vec<f64>]) -> Result<Self> {
        let dim = values.first().map_or(0, Vec::len);
        if values.iter().any(|v| v.len() != dim) {
            return config("piecewise-constant values have inconsistent dimension");
        }
        let coeffs = values.iter().flatten().copied().collect();
        Self::new(breakpoints, vec![0; values.len()], coeffs, dim)
    }

    /// Continuous piecewise-linear interpolant of `nodal[k]` at `t_k`.
    pub fn continuous_linear(breakpoints: Vec<f64>, nodal: &[Vec<f64>]) -> Result<Self> {
        if nodal.len() != breakpoints.len() {
            return config("need one nodal value per breakpoint");
        }
        let dim = nodal.first().map_or(0, Vec::len);
        let mut coeffs = Vec::with_capacity(2 * dim * (nodal.len() - 1));
        for w in nodal.windows(2) {
            if w[0].len() != dim || w[1].len() != dim {
                return config("nodal values have inconsistent dimension");
            }
            coeffs.extend(w[0].iter().zip(&w[1]).map(|(l, r)| 0.5 * (l + r)));
            coeffs.extend(w[0].iter().zip(&w[1]).map(|(l, r)| 0.5 * (r - l)));
        }
        Self::new(breakpoints, vec![1; nodal.len() - 1], coeffs, dim)
    }

    /// Samples a scalar function of time: on each interval the polynomial of
    /// the given degree interpolating `f` at Chebyshev-Lobatto points.
    pub fn interpolate_scalar<F: Fn(f64) -> f64>(breakpoints: Vec<f64>, degree: usize, f: F) -> Result<Self> {
        if degree > MAX_DEGREE {
            return config(format!("degree {degree} exceeds the cap {MAX_DEGREE}"));
        }
        let mut coeffs = Vec::new();
        let mut leg = [0.0; MAX_DEGREE + 1];
        for w in breakpoints.windows(2) {
            let (a, b) = (w[0], w[1]);
            // Solve the (degree+1)^2 Vandermonde-in-Legendre system.
            let m = degree + 1;
            let mut mat = vec![0.0; m * m];
            let mut rhs = vec![0.0; m];
            for r in 0..m {
                let tau = if degree == 0 {
                    0.0
                } else {
                    -(std::f64::consts::PI * r as f64 / degree as f64).cos()
                };
                legendre_values(tau, degree, &mut leg);
                mat[r * m..(r + 1) * m].copy_from_slice(&leg[..m]);
                rhs[r] = f(0.5 * (a + b) + 0.5 * (b - a) * tau);
            }
            coeffs.extend(solve_small(m, &mut mat, &mut rhs));
        }
        let n = breakpoints.len().saturating_sub(1);
        Self::new(breakpoints, vec![degree; n], coeffs, 1)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn num_intervals(&self) -> usize {
        self.degrees.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self, n: usize) -> usize {
        self.degrees[n]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn final_time(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Bounds of interval `n` (zero-based).
    pub fn interval(&self, n: usize) -> (f64, f64) {
        (self.breakpoints[n], self.breakpoints[n + 1])
    }

    /// Coefficient vector `c_{n,j}`.
    pub fn coefficient(&self, n: usize, j: usize) -> &[f64] {
        let start = self.offsets[n] + j * self.dim;
        &self.coeffs[start..start + self.dim]
    }

    pub fn block(&self, n: usize) -> &[f64] {
        &self.coeffs[self.offsets[n]..self.offsets[n + 1]]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Index of the interval used to evaluate at `t`: left limits at interior
    /// breakpoints, the first interval at `t = t_0`.
    pub fn interval_of(&self, t: f64) -> Result<usize> {
        let (t0, tn) = (self.breakpoints[0], self.final_time());
        if !(t >= t0 && t <= tn) {
            return domain(format!("time {t} outside [{t0}, {tn}]"));
        }
        // first breakpoint >= t, minus one
        let k = self.breakpoints.partition_point(|&b| b < t);
        Ok(k.saturating_sub(1).min(self.num_intervals() - 1))
    }

    /// Value of interval `n`'s polynomial at local coordinate `tau`.
    pub fn eval_local(&self, n: usize, tau: f64, out: &mut [f64]) {
        let p = self.degrees[n];
        let mut leg = [0.0; MAX_DEGREE + 1];
        legendre_values(tau, p, &mut leg);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &l) in leg.iter().enumerate().take(p + 1) {
            for (o, c) in out.iter_mut().zip(self.coefficient(n, j)) {
                *o += l * c;
            }
        }
    }

    /// Local coordinate of `t` in interval `n`.
    pub fn local_coordinate(&self, n: usize, t: f64) -> f64 {
        let (a, b) = self.interval(n);
        (2.0 * t - a - b) / (b - a)
    }

    /// `phi(t)`, taking the left limit at interior breakpoints.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let n = self.interval_of(t)?;
        let mut out = vec![0.0; self.dim];
        self.eval_local(n, self.local_coordinate(n, t), &mut out);
        Ok(out)
    }

    /// `X^k_-`, the left limit at breakpoint `k >= 1`.
    pub fn left_limit(&self, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_local(k - 1, 1.0, &mut out);
        out
    }

    /// `X^k_+`, the right limit at breakpoint `k < N`.
    pub fn right_limit(&self, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_local(k, -1.0, &mut out);
        out
    }

    /// `X^k_+ - X^k_-` at an interior breakpoint `1 <= k < N`.
    pub fn jump(&self, k: usize) -> Vec<f64> {
        let r = self.right_limit(k);
        let l = self.left_limit(k);
        r.iter().zip(&l).map(|(a, b)| a - b).collect()
    }

    /// Largest absolute coefficient, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Largest interior jump, relative to nothing.
    pub fn max_jump(&self) -> f64 {
        (1..self.num_intervals())
            .map(|k| self.jump(k).iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .fold(0.0, f64::max)
    }

    pub fn is_continuous(&self, tol: f64) -> bool {
        self.max_jump() <= tol
    }

    /// The interval-wise time derivative.
    pub fn derivative(&self) -> PiecewiseTrajectory {
        let d = self.dim;
        let mut degrees = Vec::with_capacity(self.num_intervals());
        let mut coeffs = Vec::new();
        for n in 0..self.num_intervals() {
            let p = self.degrees[n];
            let (a, b) = self.interval(n);
            let scale = 2.0 / (b - a);
            let q = p.saturating_sub(1);
            let mut block = vec![0.0; (q + 1) * d];
            // P_j' = sum_{i < j, j - i odd} (2i + 1) P_i
            for j in 1..=p {
                let cj = self.coefficient(n, j);
                let mut i = j as isize - 1;
                while i >= 0 {
                    let iu = i as usize;
                    let f = (2 * iu + 1) as f64 * scale;
                    for (o, c) in block[iu * d..(iu + 1) * d].iter_mut().zip(cj) {
                        *o += f * c;
                    }
                    i -= 2;
                }
            }
            degrees.push(q);
            coeffs.extend(block);
        }
        PiecewiseTrajectory::new(self.breakpoints.clone(), degrees, coeffs, d).expect("derivative shape")
    }

    /// `(M phi)(t) = t phi(t)`; raises every interval degree by one.
    pub fn times_t(&self) -> Result<PiecewiseTrajectory> {
        let d = self.dim;
        let mut degrees = Vec::with_capacity(self.num_intervals());
        let mut coeffs = Vec::new();
        for n in 0..self.num_intervals() {
            let p = self.degrees[n];
            if p + 1 > MAX_DEGREE {
                return config(format!("t*phi would have degree {} > {MAX_DEGREE}", p + 1));
            }
            let (a, b) = self.interval(n);
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            let mut block = vec![0.0; (p + 2) * d];
            for j in 0..=p {
                let cj = self.coefficient(n, j);
                // t P_j = mid P_j + half ((j+1) P_{j+1} + j P_{j-1}) / (2j+1)
                let jf = j as f64;
                let up = half * (jf + 1.0) / (2.0 * jf + 1.0);
                let down = half * jf / (2.0 * jf + 1.0);
                for (k, c) in cj.iter().enumerate() {
                    block[j * d + k] += mid * c;
                    block[(j + 1) * d + k] += up * c;
                    if j > 0 {
                        block[(j - 1) * d + k] += down * c;
                    }
                }
            }
            degrees.push(p + 1);
            coeffs.extend(block);
        }
        PiecewiseTrajectory::new(self.breakpoints.clone(), degrees, coeffs, d)
    }

    /// Applies a linear map to every coefficient vector.
    pub fn map_vectors<F: FnMut(&[f64]) -> Vec<f64>>(&self, mut f: F) -> PiecewiseTrajectory {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut dim = self.dim;
        for chunk in self.coeffs.chunks(self.dim) {
            let v = f(chunk);
            dim = v.len();
            coeffs.extend(v);
        }
        PiecewiseTrajectory::new(self.breakpoints.clone(), self.degrees.clone(), coeffs, dim)
            .expect("map_vectors preserves shape")
    }

    /// Component `k` as a scalar trajectory.
    pub fn component(&self, k: usize) -> PiecewiseTrajectory {
        self.map_vectors(|v| vec![v[k]])
    }
}

/// Gaussian elimination with partial pivoting for tiny dense systems.
pub(crate) fn solve_small(m: usize, mat: &mut [f64], rhs: &mut [f64]) -> Vec<f64> {
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| mat[i * m + col].abs().total_cmp(&mat[j * m + col].abs()))
            .unwrap();
        if piv != col {
            for k in 0..m {
                mat.swap(col * m + k, piv * m + k);
            }
            rhs.swap(col, piv);
        }
        let d = mat[col * m + col];
        for r in (col + 1)..m {
            let f = mat[r * m + col] / d;
            for k in col..m {
                mat[r * m + k] -= f * mat[col * m + k];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let mut s = rhs[r];
        for k in (r + 1)..m {
            s -= mat[r * m + k] * x[k];
        }
        x[r] = s / mat[r * m + r];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PiecewiseTrajectory {
        // interval 0: 1 + 2 P_1 ; interval 1: 3 - P_1 + 0.5 P_2 (scalar)
        PiecewiseTrajectory::new(vec![0.0, 1.0, 3.0], vec![1, 2], vec![1.0, 2.0, 3.0, -1.0, 0.5], 1).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(PiecewiseTrajectory::new(vec![0.0], vec![], vec![], 1).is_err());
        assert!(PiecewiseTrajectory::new(vec![0.0, 1.0, 1.0], vec![0, 0], vec![1.0, 1.0], 1).is_err());
        assert!(PiecewiseTrajectory::new(vec![0.0, 1.0], vec![4], vec![0.0; 5], 1).is_err());
        assert!(PiecewiseTrajectory::new(vec![0.0, 1.0], vec![1], vec![0.0; 3], 1).is_err());
    }

    #[test]
    fn evaluation_and_limits() {
        let x = sample();
        assert_eq!(x.eval(0.0).unwrap(), vec![-1.0]);
        assert_eq!(x.eval(1.0).unwrap(), vec![3.0]); // left limit
        assert_eq!(x.right_limit(1), vec![4.5]);
        assert_eq!(x.jump(1), vec![1.5]);
        assert!(x.eval(3.5).is_err());
    }

    #[test]
    fn endpoint_derivatives_match_explicit_polynomials() {
        // P_3 = (5 t^3 - 3 t)/2: P_3(-1) = -1, P_3'(-1) = 6, P_3''(-1) = -15, P_3''' = 15
        assert_eq!(legendre_endpoint_derivative(3, 0, false), -1.0);
        assert_eq!(legendre_endpoint_derivative(3, 1, false), 6.0);
        assert_eq!(legendre_endpoint_derivative(3, 2, false), -15.0);
        assert_eq!(legendre_endpoint_derivative(3, 3, false), 15.0);
        assert_eq!(legendre_endpoint_derivative(2, 1, true), 3.0);
        assert_eq!(legendre_endpoint_derivative(1, 2, true), 0.0);
    }

    #[test]
    fn derivative_and_times_t_are_consistent_with_finite_differences() {
        let x = sample();
        let dx = x.derivative();
        let tx = x.times_t().unwrap();
        for &t in &[0.3, 0.9, 1.7, 2.6] {
            let h = 1e-6;
            let fd = (x.eval(t + h).unwrap()[0] - x.eval(t - h).unwrap()[0]) / (2.0 * h);
            assert!((dx.eval(t).unwrap()[0] - fd).abs() < 1e-7);
            assert!((tx.eval(t).unwrap()[0] - t * x.eval(t).unwrap()[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let f = |t: f64| 1.0 - 2.0 * t + 0.25 * t * t * t;
        let x = PiecewiseTrajectory::interpolate_scalar(vec![0.0, 0.4, 1.5], 3, f).unwrap();
        for &t in &[0.1, 0.4, 0.8, 1.5] {
            assert!((x.eval(t).unwrap()[0] - f(t)).abs() < 1e-13);
        }
    }
}
