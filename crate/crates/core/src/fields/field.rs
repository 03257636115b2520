use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::TorusGrid;

/// A real multi-component field sampled on a [`TorusGrid`].
///
/// Components are stored one after another, each `n * n` long. Conventional
/// component counts: 1 for scalars, 2 for velocity, 3 for the director and 4
/// for a 2x2 tensor stored row-major (`T00, T01, T10, T11`).
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<TorusGrid>,
    components: usize,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Arc<TorusGrid>, components: usize) -> Self {
        Self {
            grid: Arc::clone(grid),
            components,
            values: vec![0.0; components * grid.len()],
        }
    }

    pub fn from_values(grid: &Arc<TorusGrid>, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 || values.len() != components * grid.len() {
            return Err(Error::Shape(format!(
                "{} values do not fill {components} components of a {}x{} grid",
                values.len(),
                grid.n(),
                grid.n()
            )));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            components,
            values,
        })
    }

    /// Fill component `c` of every point from `f(c, x, y)`.
    pub fn from_fn(grid: &Arc<TorusGrid>, components: usize, f: impl Fn(usize, f64, f64) -> f64) -> Self {
        let len = grid.len();
        let mut values = Vec::with_capacity(components * len);
        for c in 0..components {
            for idx in 0..len {
                let (x, y) = grid.coords(idx);
                values.push(f(c, x, y));
            }
        }
        Self {
            grid: Arc::clone(grid),
            components,
            values,
        }
    }

    pub fn from_components(grid: &Arc<TorusGrid>, parts: &[&[f64]]) -> Result<Self> {
        let mut values = Vec::with_capacity(parts.len() * grid.len());
        for p in parts {
            if p.len() != grid.len() {
                return Err(Error::Shape(format!(
                    "component of length {} on a grid of {} points",
                    p.len(),
                    grid.len()
                )));
            }
            values.extend_from_slice(p);
        }
        Self::from_values(grid, parts.len(), values)
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.grid.len();
        &self.values[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let len = self.grid.len();
        &mut self.values[c * len..(c + 1) * len]
    }

    /// All components at one grid point.
    pub fn at(&self, idx: usize) -> Vec<f64> {
        let len = self.grid.len();
        (0..self.components).map(|c| self.values[c * len + idx]).collect()
    }

    pub fn require_components(&self, expected: usize, what: &str) -> Result<()> {
        if self.components == expected {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{what} needs {expected} components, got {}",
                self.components
            )))
        }
    }

    pub fn require_same_grid(&self, other: &Field) -> Result<()> {
        if *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "grid mismatch: {:?} vs {:?}",
                self.grid, other.grid
            )))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max-norm distance to another field of the same shape.
    pub fn max_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Pointwise Euclidean norm over components.
    pub fn pointwise_norm(&self) -> Vec<f64> {
        self.pointwise_norm_sq().into_iter().map(f64::sqrt).collect()
    }

    pub fn pointwise_norm_sq(&self) -> Vec<f64> {
        let len = self.grid.len();
        let mut out = vec![0.0; len];
        for c in 0..self.components {
            for (o, v) in out.iter_mut().zip(&self.values[c * len..(c + 1) * len]) {
                *o += v * v;
            }
        }
        out
    }

    pub fn scale(&mut self, a: f64) {
        self.values.iter_mut().for_each(|v| *v *= a);
    }

    pub fn scaled(&self, a: f64) -> Field {
        let mut f = self.clone();
        f.scale(a);
        f
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Field) {
        debug_assert_eq!(self.values.len(), other.values.len());
        for (s, o) in self.values.iter_mut().zip(&other.values) {
            *s += a * o;
        }
    }

    /// Re-attach the same samples to a grid with equal `n` but a different period.
    pub fn on_grid(&self, grid: &Arc<TorusGrid>) -> Result<Field> {
        if grid.n() != self.grid.n() {
            return Err(Error::Shape(format!(
                "cannot move {}-point samples onto an n = {} grid",
                self.grid.n(),
                grid.n()
            )));
        }
        Field::from_values(grid, self.components, self.values.clone())
    }
}
