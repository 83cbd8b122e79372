use crate::error::{config, Result};

/// Nodes `x_0 = x_L < x_1 < ... < x_{M+1} = x_R` of a 1D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return config(format!("a mesh needs at least one interior node, got {} nodes", nodes.len()));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return config("mesh nodes must be finite");
        }
        if let Some(i) = nodes.windows(2).position(|w| !(w[1] > w[0])) {
            return config(format!("mesh nodes not strictly increasing at index {}", i + 1));
        }
        Ok(Mesh1D { nodes })
    }

    /// `m` interior nodes, equally spaced on `[x_l, x_r]`.
    pub fn uniform(x_l: f64, x_r: f64, m: usize) -> Result<Self> {
        if !(x_r > x_l) {
            return config(format!("degenerate interval [{x_l}, {x_r}]"));
        }
        if m == 0 {
            return config("a mesh needs at least one interior node");
        }
        let h = (x_r - x_l) / (m + 1) as f64;
        let mut nodes: Vec<f64> = (0..=m + 1).map(|i| x_l + i as f64 * h).collect();
        nodes[m + 1] = x_r;
        Mesh1D::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn interior_nodes(&self) -> &[f64] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn num_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    /// Largest element length.
    pub fn h(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn x_left(&self) -> f64 {
        self.nodes[0]
    }

    pub fn x_right(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn length(&self) -> f64 {
        self.x_right() - self.x_left()
    }
}

/// Continuous piecewise-linear functions on a mesh vanishing at both ends;
/// degree of freedom `i` is the value at interior node `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeSpace {
    mesh: Mesh1D,
}

impl FeSpace {
    pub fn new(mesh: Mesh1D) -> Self {
        FeSpace { mesh }
    }

    pub fn uniform(x_l: f64, x_r: f64, m: usize) -> Result<Self> {
        Ok(FeSpace::new(Mesh1D::uniform(x_l, x_r, m)?))
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn dofs(&self) -> usize {
        self.mesh.nodes.len() - 2
    }

    /// Nodal values of element `e` (left, right) including the zero boundary values.
    pub(crate) fn element_values(&self, c: &[f64], e: usize) -> (f64, f64) {
        let m = self.dofs();
        let left = if e == 0 { 0.0 } else { c[e - 1] };
        let right = if e == m { 0.0 } else { c[e] };
        (left, right)
    }

    /// Evaluates the FE function with coefficients `c` at `x`.
    pub fn eval(&self, c: &[f64], x: f64) -> f64 {
        let nodes = &self.mesh.nodes;
        if x <= nodes[0] || x >= nodes[nodes.len() - 1] {
            return 0.0;
        }
        let e = nodes.partition_point(|&n| n <= x) - 1;
        let (xl, xr) = self.mesh.element(e);
        let (vl, vr) = self.element_values(c, e);
        vl + (vr - vl) * (x - xl) / (xr - xl)
    }

    /// Nodal interpolant of `v` at the interior nodes.
    pub fn interpolate<F: Fn(f64) -> f64>(&self, v: F) -> Vec<f64> {
        self.mesh.interior_nodes().iter().map(|&x| v(x)).collect()
    }
}
