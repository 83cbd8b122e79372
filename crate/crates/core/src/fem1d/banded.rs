//! Tridiagonal spatial operators and direct banded solvers.

use crate::error::{Error, Result};
use crate::fracops::InnerProduct;

/// An `n x n` tridiagonal matrix. `lower[i]` is entry `(i+1, i)`,
/// `upper[i]` is entry `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    symmetric: bool,
}

impl BandedOperator {
    pub fn zeros(n: usize) -> Self {
        BandedOperator {
            lower: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            upper: vec![0.0; n.saturating_sub(1)],
            symmetric: true,
        }
    }

    pub fn from_diagonals(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || lower.len() != n - 1 || upper.len() != n - 1 {
            return Err(Error::Config(format!(
                "diagonal lengths {}/{}/{} do not form a tridiagonal matrix",
                lower.len(),
                n,
                upper.len()
            )));
        }
        let symmetric = lower == upper;
        Ok(BandedOperator { lower, diag, upper, symmetric })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i == j + 1 {
            self.lower[j]
        } else if j == i + 1 {
            self.upper[i]
        } else {
            0.0
        }
    }

    /// Adds `v` to entry `(i, j)`, `|i - j| <= 1`.
    pub(crate) fn add(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            self.diag[i] += v;
        } else if i == j + 1 {
            self.lower[j] += v;
        } else if j == i + 1 {
            self.upper[i] += v;
        } else {
            panic!("entry ({i}, {j}) outside the tridiagonal band");
        }
    }

    pub(crate) fn refresh_symmetry(&mut self) {
        self.symmetric = self.lower == self.upper;
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.upper[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    /// `y += s A x`.
    pub fn apply_add(&self, s: f64, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.upper[i] * x[i + 1];
            }
            y[i] += s * v;
        }
    }

    /// `x^T A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.inner(x, x)
    }

    /// `a A + b B`.
    pub fn combine(a: f64, x: &BandedOperator, b: f64, y: &BandedOperator) -> BandedOperator {
        assert_eq!(x.dim(), y.dim());
        let mix = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(u, v)| a * u + b * v).collect::<Vec<_>>();
        let mut out = BandedOperator {
            lower: mix(&x.lower, &y.lower),
            diag: mix(&x.diag, &y.diag),
            upper: mix(&x.upper, &y.upper),
            symmetric: false,
        };
        out.refresh_symmetry();
        out
    }

    pub fn scaled(&self, s: f64) -> BandedOperator {
        BandedOperator::combine(s, self, 0.0, self)
    }

    pub fn max_abs(&self) -> f64 {
        self.lower.iter().chain(&self.diag).chain(&self.upper).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `L D L^T` factorization of a symmetric positive definite operator.
    pub fn cholesky(&self) -> Result<TridiagCholesky> {
        if !self.symmetric {
            return Err(Error::Config("Cholesky needs a symmetric operator".into()));
        }
        let n = self.dim();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = self.diag[0];
        for i in 1..n {
            if !(d[i - 1] > 0.0) {
                break;
            }
            l[i - 1] = self.lower[i - 1] / d[i - 1];
            d[i] = self.diag[i] - l[i - 1] * self.lower[i - 1];
        }
        if let Some(i) = d.iter().position(|v| !(*v > 0.0)) {
            return Err(Error::Config(format!("operator is not positive definite (pivot {i} = {:e})", d[i])));
        }
        Ok(TridiagCholesky { l, d })
    }

    /// Dense copy into a general band matrix with the given band widths.
    pub fn to_band(&self, kl: usize, ku: usize) -> BandMatrix {
        let n = self.dim();
        let mut b = BandMatrix::zeros(n, kl.max(1), ku.max(1));
        for i in 0..n {
            b.add(i, i, self.diag[i]);
            if i + 1 < n {
                b.add(i + 1, i, self.lower[i]);
                b.add(i, i + 1, self.upper[i]);
            }
        }
        b
    }
}

impl InnerProduct for BandedOperator {
    /// `a^T A b`.
    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            let mut v = self.diag[i] * b[i];
            if i > 0 {
                v += self.lower[i - 1] * b[i - 1];
            }
            if i + 1 < n {
                v += self.upper[i] * b[i + 1];
            }
            s += a[i] * v;
        }
        s
    }
}

/// `A = L D L^T` with unit lower bidiagonal `L`.
#[derive(Debug, Clone)]
pub struct TridiagCholesky {
    l: Vec<f64>,
    d: Vec<f64>,
}

impl TridiagCholesky {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.d.len();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
    }

    pub fn pivots(&self) -> &[f64] {
        &self.d
    }
}

/// General `n x n` band matrix with `kl` sub- and `ku` superdiagonals, stored
/// with `kl` extra superdiagonals for the fill-in of partial pivoting.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Adds `v` to entry `(i, j)`; panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i}, {j}) outside the band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// LU factorization with partial pivoting. `step` labels the diagnostics.
    pub fn factor(mut self, step: usize) -> Result<BandLu> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !scale.is_finite() {
            return Err(Error::Singular { step, detail: "matrix has non-finite entries".into() });
        }
        let mut perm = vec![0usize; n];
        for col in 0..n {
            let last = (col + kl).min(n - 1);
            let mut piv = col;
            let mut best = self.data[self.idx(col, col)].abs();
            for r in col + 1..=last {
                let v = self.data[self.idx(r, col)].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if !(best > 1e-15 * scale * n as f64) {
                return Err(Error::Singular {
                    step,
                    detail: format!("pivot {col} has magnitude {best:e} against matrix scale {scale:e}"),
                });
            }
            perm[col] = piv;
            let right = (col + ku + kl).min(n - 1);
            if piv != col {
                for c in col..=right {
                    let (a, b) = (self.idx(col, c), self.idx(piv, c));
                    self.data.swap(a, b);
                }
            }
            let d = self.data[self.idx(col, col)];
            for r in col + 1..=last {
                let k = self.idx(r, col);
                let l = self.data[k] / d;
                self.data[k] = l;
                if l != 0.0 {
                    for c in col + 1..=right {
                        let u = self.data[self.idx(col, c)];
                        let k = self.idx(r, c);
                        self.data[k] -= l * u;
                    }
                }
            }
        }
        Ok(BandLu { m: self, perm })
    }
}

/// Packed `P A = L U` factors of a [`BandMatrix`].
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    perm: Vec<usize>,
}

impl BandLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let m = &self.m;
        let n = m.n;
        for col in 0..n {
            b.swap(col, self.perm[col]);
            let last = (col + m.kl).min(n - 1);
            for r in col + 1..=last {
                b[r] -= m.data[m.idx(r, col)] * b[col];
            }
        }
        for i in (0..n).rev() {
            let right = (i + m.ku + m.kl).min(n - 1);
            let mut s = b[i];
            for c in i + 1..=right {
                s -= m.data[m.idx(i, c)] * b[c];
            }
            b[i] = s / m.data[m.idx(i, i)];
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
