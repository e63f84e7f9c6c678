//! Uniformly sampled functions on [0, T], the common currency of every
//! operator in the crate. Values are flat `d`-vectors per node; node 0 may be
//! explicitly undefined (singular kernels have no sample there).

use crate::laplace::Grid;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    dim: usize,
    data: Vec<f64>,
    defined: Vec<bool>,
}

impl GridFunction {
    /// All nodes undefined, values zeroed.
    pub fn undefined(grid: Grid, dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        let n = grid.len();
        GridFunction {
            grid,
            dim,
            data: vec![0.0; n * dim],
            defined: vec![false; n],
        }
    }

    /// All nodes defined and zero.
    pub fn zeros(grid: Grid, dim: usize) -> Self {
        let mut out = Self::undefined(grid, dim);
        out.defined.fill(true);
        out
    }

    /// Scalar function sampled from a closure at every node.
    pub fn sample_scalar(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let mut out = Self::undefined(grid, 1);
        for j in 0..grid.len() {
            out.set_scalar(j, f(grid.node(j)));
        }
        out
    }

    /// Scalar function from explicit samples (length must be n_steps + 1).
    pub fn from_scalar_samples(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        Self::from_samples(grid, 1, samples)
    }

    /// Vector function from a flat row-major sample array.
    pub fn from_samples(grid: Grid, dim: usize, samples: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::GridFunction("dimension must be positive".into()));
        }
        if samples.len() != grid.len() * dim {
            return Err(Error::GridFunction(format!(
                "expected {} samples, got {}",
                grid.len() * dim,
                samples.len()
            )));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::GridFunction(format!("non-finite sample {bad}")));
        }
        Ok(GridFunction {
            grid,
            dim,
            data: samples,
            defined: vec![true; grid.len()],
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of nodes (n_steps + 1).
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_defined(&self, j: usize) -> bool {
        self.defined[j]
    }

    /// Vector value at node j; errors if the node is undefined.
    pub fn value(&self, j: usize) -> Result<&[f64]> {
        if !self.defined[j] {
            return Err(Error::UndefinedSample(j));
        }
        Ok(&self.data[j * self.dim..(j + 1) * self.dim])
    }

    /// Vector value without the definedness check (zeros where undefined).
    pub fn value_or_zero(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    /// Scalar value at node j (dim must be 1).
    pub fn scalar(&self, j: usize) -> Result<f64> {
        debug_assert_eq!(self.dim, 1);
        Ok(self.value(j)?[0])
    }

    pub fn set(&mut self, j: usize, value: &[f64]) {
        assert_eq!(value.len(), self.dim);
        self.data[j * self.dim..(j + 1) * self.dim].copy_from_slice(value);
        self.defined[j] = true;
    }

    pub fn set_scalar(&mut self, j: usize, value: f64) {
        debug_assert_eq!(self.dim, 1);
        self.data[j] = value;
        self.defined[j] = true;
    }

    pub fn mark_undefined(&mut self, j: usize) {
        self.defined[j] = false;
    }

    /// Time reversal: node j takes the value of node N - j.
    pub fn mirror(&self) -> Self {
        let n = self.len();
        let mut out = Self::undefined(self.grid, self.dim);
        for j in 0..n {
            let src = n - 1 - j;
            if self.defined[src] {
                out.set(j, self.value_or_zero(src));
            }
        }
        out
    }

    /// Linear interpolation of a scalar function at time t in [0, t_end].
    /// Both bracketing nodes must be defined.
    pub fn interp_scalar(&self, t: f64) -> Result<f64> {
        debug_assert_eq!(self.dim, 1);
        let h = self.grid.h();
        if !(0.0..=self.grid.t_end + 1e-12 * self.grid.t_end).contains(&t) {
            return Err(Error::GridFunction(format!(
                "interpolation time {t} outside [0, {}]",
                self.grid.t_end
            )));
        }
        let j = ((t / h).floor() as usize).min(self.grid.n_steps - 1);
        let w = (t - self.grid.node(j)) / h;
        Ok((1.0 - w) * self.scalar(j)? + w * self.scalar(j + 1)?)
    }

    /// Max absolute difference against another function over nodes where both
    /// are defined and `t_j >= t_min`.
    pub fn max_abs_diff(&self, other: &GridFunction, t_min: f64) -> f64 {
        let mut worst = 0.0_f64;
        for j in 0..self.len().min(other.len()) {
            if self.grid.node(j) < t_min || !self.defined[j] || !other.defined[j] {
                continue;
            }
            let a = self.value_or_zero(j);
            let b = other.value_or_zero(j);
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
        worst
    }

    /// Max absolute value over defined nodes with `t_j >= t_min`.
    pub fn max_abs(&self, t_min: f64) -> f64 {
        let mut worst = 0.0_f64;
        for j in 0..self.len() {
            if self.grid.node(j) < t_min || !self.defined[j] {
                continue;
            }
            for v in self.value_or_zero(j) {
                worst = worst.max(v.abs());
            }
        }
        worst
    }

    /// a*self + b*other, defined where both inputs are defined.
    pub fn linear_combination(&self, a: f64, other: &GridFunction, b: f64) -> Result<GridFunction> {
        if self.grid != other.grid || self.dim != other.dim {
            return Err(Error::GridFunction(
                "mismatched grids or dimensions in linear combination".into(),
            ));
        }
        let mut out = GridFunction::undefined(self.grid, self.dim);
        for j in 0..self.len() {
            if self.defined[j] && other.defined[j] {
                let v: Vec<f64> = self
                    .value_or_zero(j)
                    .iter()
                    .zip(other.value_or_zero(j))
                    .map(|(x, y)| a * x + b * y)
                    .collect();
                out.set(j, &v);
            }
        }
        Ok(out)
    }
}
