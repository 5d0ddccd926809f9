//! Uniform time grids and real-valued paths sampled on them.

use crate::error::{Error, Result};

/// A uniform partition of `[t_start, t_end]` into `n_steps` cells.
///
/// Node `i` sits at `t_start + i * dt` with `dt = (t_end - t_start) / n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_steps: usize) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() || t_end <= t_start {
            return Err(Error::Parameter(format!(
                "time grid needs finite t_start < t_end, got [{t_start}, {t_end}]"
            )));
        }
        if n_steps == 0 {
            return Err(Error::Parameter("time grid needs n_steps >= 1".into()));
        }
        Ok(Self {
            t_start,
            t_end,
            n_steps,
        })
    }

    /// Grid on `[0, 1]`, the horizon used by every experiment.
    pub fn unit(n_steps: usize) -> Result<Self> {
        Self::new(0.0, 1.0, n_steps)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    pub fn span(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn dt(&self) -> f64 {
        self.span() / self.n_steps as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.dt()
    }

    /// Grid with every `factor`-th node of `self`; `factor` must divide `n_steps`.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.n_steps % factor != 0 {
            return Err(Error::Parameter(format!(
                "coarsening factor {factor} does not divide n_steps {}",
                self.n_steps
            )));
        }
        Self::new(self.t_start, self.t_end, self.n_steps / factor)
    }
}

/// A real-valued path sampled at the nodes of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl GridPath {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::Parameter(format!(
                "path needs {} values for a grid with {} steps, got {}",
                grid.n_nodes(),
                grid.n_steps(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: TimeGrid, c: f64) -> Self {
        let values = vec![c; grid.n_nodes()];
        Self { grid, values }
    }

    /// Sample `f` at every grid node.
    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n_nodes()).map(|i| f(grid.node(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("grid path is never empty")
    }

    pub fn n_steps(&self) -> usize {
        self.grid.n_steps()
    }

    /// The increment `X_t - X_s` between two node indices.
    pub fn increment(&self, s_idx: usize, t_idx: usize) -> f64 {
        self.values[t_idx] - self.values[s_idx]
    }

    /// Pointwise difference of two paths on the same grid.
    pub fn sub(&self, other: &GridPath) -> Result<GridPath> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "cannot subtract paths on different grids".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a - b)
            .collect();
        Ok(GridPath {
            grid: self.grid,
            values,
        })
    }

    /// Restriction to every `factor`-th node.
    pub fn restrict(&self, factor: usize) -> Result<GridPath> {
        let grid = self.grid.coarsen(factor)?;
        let values = self.values.iter().step_by(factor).copied().collect();
        Ok(GridPath { grid, values })
    }
}
