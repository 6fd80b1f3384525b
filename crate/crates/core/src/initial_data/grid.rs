use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 16;

/// Uniform grid with nodes `x_i = x_min + i * dx`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    dx: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, dx: f64, n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::Domain(format!("grid needs at least {MIN_NODES} nodes, got {n}")));
        }
        if !(dx > 0.0 && dx.is_finite()) || !x_min.is_finite() {
            return Err(Error::Domain(format!("invalid grid spacing {dx} or origin {x_min}")));
        }
        Ok(Self { x_min, dx, n })
    }

    /// Cell-centred grid on `[-half_width, half_width]`, symmetric about 0.
    pub fn centered(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Domain(format!("half width must be positive, got {half_width}")));
        }
        let dx = 2.0 * half_width / n as f64;
        Self::new(-half_width + 0.5 * dx, dx, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Largest `|x|` over the nodes.
    pub fn extent(&self) -> f64 {
        self.x_min.abs().max(self.x_max().abs())
    }
}

/// Grid function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::Domain(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.n()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite field value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    /// Skips the finiteness check; used for sealed solver states.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n()],
        }
    }

    pub fn constant(grid: Grid, v: f64) -> Self {
        Self {
            grid,
            values: vec![v; grid.n()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }

    pub fn argmin(&self) -> usize {
        argmin(&self.values)
    }

    /// Composite trapezoid rule over the grid nodes.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.grid.dx)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Value at an arbitrary point by linear interpolation; `None` outside
    /// the node range.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        interpolate(&self.values, &self.grid, x)
    }
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn trapezoid(v: &[f64], dx: f64) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => 0.0,
        n => {
            let inner: f64 = v[1..n - 1].iter().sum();
            dx * (inner + 0.5 * (v[0] + v[n - 1]))
        }
    }
}

pub(crate) fn interpolate(v: &[f64], grid: &Grid, x: f64) -> Option<f64> {
    let s = (x - grid.x_min()) / grid.dx();
    if !(s >= 0.0 && s <= (grid.n() - 1) as f64) {
        return None;
    }
    let i = (s.floor() as usize).min(grid.n() - 2);
    let w = s - i as f64;
    Some((1.0 - w) * v[i] + w * v[i + 1])
}

/// Spatial derivative: 4th-order central stencil in the interior, 2nd-order
/// central next to the boundary and 2nd-order one-sided on it.
pub fn derivative(f: &Field) -> Field {
    let v = &f.values;
    let n = v.len();
    let h = f.grid.dx;
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    d[1] = (v[2] - v[0]) / (2.0 * h);
    d[n - 2] = (v[n - 1] - v[n - 3]) / (2.0 * h);
    for i in 2..n - 2 {
        d[i] = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h);
    }
    Field::from_raw(f.grid, d)
}

/// Smallest `K` with `|f| <= tol` at every node outside `[-K, K]`.
pub fn compact_support_radius(f: &Field, tol: f64) -> f64 {
    f.values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > tol)
        .map(|(i, _)| f.grid.x(i).abs())
        .fold(0.0, f64::max)
}
